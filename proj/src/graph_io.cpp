#include "molspin/graph_io.hpp"

#include <cstdio>
#include <fstream>

#include "molspin/errors.hpp"

namespace molspin {

using nlohmann::json;

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vector3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Eigen::Matrix4d matrix4_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("expected a 4x4 matrix");
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_array() || j[i].size() != 4) throw ValidationError("expected a 4x4 matrix");
    for (int k = 0; k < 4; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json to_json(const CouplingTensor& t) {
  return {{"A", to_json(Eigen::MatrixXd(t.A))}, {"prefactor", t.prefactor}, {"units", "gamma"}};
}

json to_json(const SpinGraph& graph, const EdgeReport& report) {
  json j;
  j["sites"] = json::array();
  for (const auto& s : graph.sites) j["sites"].push_back(to_json(s));
  j["edges"] = json::array();
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const auto& e = graph.edges[k];
    json je = {{"i", e.i},
               {"j", e.j},
               {"separation", to_json(e.separation)},
               {"block", to_json(Eigen::MatrixXd(e.block))}};
    if (k < report.edges.size()) {
      je["label"] = report.edges[k].label;
      je["strength"] = report.edges[k].strength;
      je["bucket"] = bucket_name(report.edges[k].bucket);
    }
    j["edges"].push_back(je);
  }
  j["fields"] = json::array();
  for (const auto& f : graph.fields) j["fields"].push_back(to_json(f));
  return j;
}

SpinGraph spin_graph_from_json(const json& j) {
  SpinGraph g;
  for (const auto& s : j.at("sites")) g.sites.push_back(vector3_from_json(s));
  for (const auto& e : j.at("edges")) {
    SpinEdge edge;
    edge.i = e.at("i").get<int>();
    edge.j = e.at("j").get<int>();
    edge.separation = vector3_from_json(e.at("separation"));
    edge.block = matrix4_from_json(e.at("block"));
    if (edge.i < 0 || edge.j < 0 || edge.i >= g.size() || edge.j >= g.size()) {
      throw ValidationError("edge refers to a missing site");
    }
    g.edges.push_back(edge);
  }
  for (const auto& f : j.at("fields")) g.fields.push_back(vector3_from_json(f));
  if (g.fields.size() != g.sites.size()) throw ValidationError("one pseudo-field per site expected");
  return g;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string text;
  for (std::size_t k = 0; k < header.size(); ++k) text += (k ? "," : "") + header[k];
  text += "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) text += (k ? "," : "") + format_number(row[k]);
    text += "\n";
  }
  write_text(path, text);
}

}  // namespace molspin
