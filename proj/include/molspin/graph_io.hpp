#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "molspin/effcoupling.hpp"
#include "molspin/lattice.hpp"

namespace molspin {

nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const Eigen::Vector3d& v);
Eigen::Vector3d vector3_from_json(const nlohmann::json& j);
Eigen::Matrix4d matrix4_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CouplingTensor& t);

/// Sites, edges (pair, separation, block, dominant label, strength) and
/// pseudo-fields.  Doubles are written with round-trip precision.
nlohmann::json to_json(const SpinGraph& graph, const EdgeReport& report);
SpinGraph spin_graph_from_json(const nlohmann::json& j);

/// "%.12g" formatting used by every CSV writer.
std::string format_number(double v);

void write_text(const std::string& path, const std::string& text);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace molspin
