#include "rroa/roa/certificate_io.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rroa {
namespace roa {

using Json = nlohmann::ordered_json;
using poly::Monomial;
using poly::Polynomial;

namespace {

Json PolyToJson(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms()) {
    terms.push_back({{"exponents", m.exponents()}, {"coefficient", c}});
  }
  return {{"nvars", p.nvars()}, {"terms", terms}};
}

Polynomial PolyFromJson(const Json& j) {
  Polynomial p(j.at("nvars").get<int>());
  for (const auto& t : j.at("terms")) {
    const Monomial m(t.at("exponents").get<std::vector<int>>());
    if (m.nvars() != p.nvars()) throw std::runtime_error("certificate: bad exponent length");
    p.AddTerm(m, t.at("coefficient").get<double>());
  }
  return p;
}

Json MatrixToJson(const Eigen::MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    std::vector<double> r(M.cols());
    for (Eigen::Index k = 0; k < M.cols(); ++k) r[k] = M(i, k);
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd MatrixFromJson(const Json& j) {
  const Eigen::Index n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = j[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw std::runtime_error("certificate: Gram matrix is not square");
    }
    for (Eigen::Index k = 0; k < n; ++k) M(i, k) = row[k];
  }
  return M;
}

Json ConfigToJson(const RoaConfig& c) {
  Json j;
  j["k"] = c.k;
  j["mult_degree"] = c.mult_degree ? Json(*c.mult_degree) : Json(nullptr);
  j["solver"] = {{"feasibility_tol", c.solver.feasibility_tol},
                 {"gap_tol", c.solver.gap_tol},
                 {"near_optimal_gap", c.solver.near_optimal_gap},
                 {"eig_tol", c.solver.eig_tol},
                 {"max_iterations", c.solver.max_iterations},
                 {"polish", c.solver.polish}};
  j["samples"] = c.samples;
  j["policies"] = c.policies;
  j["horizon"] = c.horizon;
  j["seed"] = c.seed;
  j["sample_tol"] = c.sample_tol;
  j["check_grid"] = c.check_grid;
  j["disturbance_grid"] = c.disturbance_grid;
  return j;
}

RoaConfig ConfigFromJson(const Json& j) {
  RoaConfig c;
  c.k = j.at("k").get<int>();
  if (!j.at("mult_degree").is_null()) c.mult_degree = j["mult_degree"].get<int>();
  const auto& s = j.at("solver");
  c.solver.feasibility_tol = s.at("feasibility_tol").get<double>();
  c.solver.gap_tol = s.at("gap_tol").get<double>();
  c.solver.near_optimal_gap = s.value("near_optimal_gap", c.solver.near_optimal_gap);
  c.solver.eig_tol = s.at("eig_tol").get<double>();
  c.solver.max_iterations = s.at("max_iterations").get<int>();
  c.solver.polish = s.value("polish", true);
  c.samples = j.at("samples").get<int>();
  c.policies = j.at("policies").get<int>();
  c.horizon = j.at("horizon").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.sample_tol = j.at("sample_tol").get<double>();
  c.check_grid = j.at("check_grid").get<int>();
  c.disturbance_grid = j.at("disturbance_grid").get<int>();
  return c;
}

}  // namespace

std::string CertificateToJson(const RoaCertificate& cert) {
  Json j;
  j["n"] = cert.n;
  j["R2"] = cert.R2;
  j["status"] = sos::ToString(cert.status);
  j["solver_message"] = cert.solver_message;
  j["backend"] = cert.backend;
  j["objective"] = cert.objective;
  j["u"] = PolyToJson(cert.u);
  j["max_residual"] = cert.max_residual;
  j["min_eigenvalue"] = cert.min_eigenvalue;
  j["iterations"] = cert.iterations;
  j["identities"] = Json::array();
  for (std::size_t i = 0; i < cert.identity_names.size(); ++i) {
    j["identities"].push_back(
        {{"name", cert.identity_names[i]},
         {"residual", i < cert.identity_residuals.size() ? cert.identity_residuals[i] : 0.0}});
  }
  j["multipliers"] = Json::array();
  for (std::size_t i = 0; i < cert.multiplier_names.size(); ++i) {
    Json m = {{"name", cert.multiplier_names[i]}};
    if (i < cert.gram_bases.size()) {
      Json basis = Json::array();
      for (const auto& e : cert.gram_bases[i].elements()) basis.push_back(e.exponents());
      m["nvars"] = cert.gram_bases[i].nvars();
      m["maxdeg"] = cert.gram_bases[i].maxdeg();
      m["basis"] = basis;
      m["gram"] = MatrixToJson(cert.grams[i]);
    }
    j["multipliers"].push_back(m);
  }
  j["sdp"] = {{"rows", cert.sdp_rows}, {"free", cert.sdp_free}, {"blocks", cert.block_sizes}};
  j["model_hash"] = cert.model_hash;
  j["config"] = ConfigToJson(cert.config);
  return j.dump(2) + "\n";
}

RoaCertificate CertificateFromJson(const std::string& text) {
  RoaCertificate cert;
  try {
    const Json j = Json::parse(text);
    cert.n = j.at("n").get<int>();
    cert.R2 = j.at("R2").get<double>();
    cert.status = sos::SolveStatusFromString(j.at("status").get<std::string>());
    cert.solver_message = j.value("solver_message", "");
    cert.backend = j.value("backend", "");
    cert.objective = j.at("objective").get<double>();
    cert.u = PolyFromJson(j.at("u"));
    if (cert.u.nvars() != cert.n) throw std::runtime_error("certificate: u has wrong arity");
    cert.max_residual = j.value("max_residual", 0.0);
    cert.min_eigenvalue = j.value("min_eigenvalue", 0.0);
    cert.iterations = j.value("iterations", 0);
    for (const auto& id : j.value("identities", Json::array())) {
      cert.identity_names.push_back(id.at("name").get<std::string>());
      cert.identity_residuals.push_back(id.at("residual").get<double>());
    }
    for (const auto& m : j.value("multipliers", Json::array())) {
      cert.multiplier_names.push_back(m.at("name").get<std::string>());
      if (!m.contains("gram")) continue;
      std::vector<Monomial> elems;
      for (const auto& e : m.at("basis")) elems.emplace_back(e.get<std::vector<int>>());
      cert.gram_bases.emplace_back(m.at("nvars").get<int>(), m.at("maxdeg").get<int>(),
                                   std::move(elems));
      cert.grams.push_back(MatrixFromJson(m.at("gram")));
    }
    if (j.contains("sdp")) {
      cert.sdp_rows = j["sdp"].value("rows", 0);
      cert.sdp_free = j["sdp"].value("free", 0);
      cert.block_sizes = j["sdp"].value("blocks", std::vector<int>{});
    }
    cert.model_hash = j.value("model_hash", "");
    cert.config = ConfigFromJson(j.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("certificate: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("certificate: ") + e.what());
  }
  return cert;
}

void WriteCertificate(const RoaCertificate& cert, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << CertificateToJson(cert);
}

RoaCertificate ReadCertificate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return CertificateFromJson(ss.str());
}

}  // namespace roa
}  // namespace rroa
