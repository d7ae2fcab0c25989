#include "elca/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace elca::io {

namespace {

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Vector vector_from(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) throw ValidationError(std::string("missing array '") + key + "'");
  const Json& arr = doc[key];
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Index>(i)] = arr[i].get<double>();
  return v;
}

Matrix matrix_from(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) throw ValidationError(std::string("missing array '") + key + "'");
  const Json& rows = doc[key];
  if (rows.empty()) throw ValidationError(std::string("'") + key + "' has no rows");
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) throw ValidationError(std::string("'") + key + "' is ragged");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j].get<double>();
  }
  return m;
}

Json index_json(const std::vector<Index>& labels) {
  Json out = Json::array();
  for (Index z : labels) out.push_back(z + 1);
  return out;
}

}  // namespace

Json to_json(const ElcaParams& p) {
  Json doc;
  doc["vertex_labels"] = p.vertex_labels;
  doc["pi"] = vector_json(p.pi);
  doc["tau"] = vector_json(p.tau);
  doc["a"] = vector_json(p.a);
  doc["phi"] = matrix_json(p.phi);
  return doc;
}

ElcaParams params_from_json(const Json& doc) {
  try {
    ElcaParams p;
    p.pi = vector_from(doc, "pi");
    p.tau = vector_from(doc, "tau");
    p.a = vector_from(doc, "a");
    p.phi = matrix_from(doc, "phi");
    if (doc.contains("vertex_labels")) p.vertex_labels = doc["vertex_labels"].get<std::vector<std::string>>();
    require_valid(p);
    return p;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed parameter document: ") + e.what());
  }
}

LcaParams lca_params_from_json(const Json& doc) {
  if (!doc.contains("p")) return implied_lca(params_from_json(doc));
  try {
    LcaParams p{vector_from(doc, "pi"), matrix_from(doc, "p")};
    if (!validate(p).empty()) throw ValidationError("invalid LCA parameters");
    return p;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed LCA parameter document: ") + e.what());
  }
}

Json to_json(const FitResult& r, bool include_responsibilities) {
  Json doc = to_json(r.params);
  doc["loglik"] = r.final_loglik();
  doc["loglik_trace"] = r.loglik_trace;
  doc["n_iter"] = r.n_iter;
  doc["converged"] = r.converged;
  doc["seed"] = r.seed;
  doc["z1"] = index_json(r.z1);
  doc["z2"] = index_json(r.z2);
  if (include_responsibilities) {
    Json resp = Json::array();
    for (Index j = 0; j < r.resp.n_edges(); ++j) {
      Json edge = Json::array();
      for (Index g = 0; g < r.resp.n_clusters(); ++g) {
        Json row = Json::array();
        for (Index k = 0; k < r.resp.n_extra(); ++k) row.push_back(r.resp(j, g, k));
        edge.push_back(std::move(row));
      }
      resp.push_back(std::move(edge));
    }
    doc["responsibilities"] = std::move(resp);
  }
  return doc;
}

Json to_json(const CvEstimate& e) {
  Json reps = Json::array();
  for (double v : e.replicates) reps.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
  Json doc;
  doc["mean"] = e.mean;
  doc["failed"] = e.failed;
  doc["replicates"] = std::move(reps);
  return doc;
}

Json to_json(const CvSelection& s) {
  Json doc;
  doc["g_opt"] = s.g_opt;
  doc["k_opt"] = s.k_opt;
  doc["best_cv_loglik"] = s.table.at({s.g_opt, s.k_opt}).mean;
  Json traj = Json::array();
  for (const auto& key : s.trajectory) {
    Json row = to_json(s.table.at(key));
    row["G"] = key.first;
    row["K"] = key.second;
    traj.push_back(std::move(row));
  }
  doc["trajectory"] = std::move(traj);
  return doc;
}

Json to_json(const MomentReport& r) {
  Json doc;
  doc["mean_lca"] = r.mean_lca;
  doc["var_lca"] = r.var_lca;
  doc["mean_elca"] = r.mean_elca;
  doc["var_elca"] = r.var_elca;
  doc["var_gap"] = r.var_gap;
  return doc;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace elca::io
