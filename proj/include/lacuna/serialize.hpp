#pragma once

#include <string>

#include "lacuna/density.hpp"
#include "lacuna/gamma2.hpp"
#include "lacuna/group.hpp"
#include "lacuna/json_io.hpp"
#include "lacuna/partition.hpp"
#include "lacuna/window.hpp"

namespace lacuna {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kSupportedVersions[] = {1};

json set_to_json(const FiniteSet& s);
FiniteSet set_from_json(const json& j);

json weights_to_json(const WeightFunction& f);
WeightFunction weights_from_json(const json& j);

json window_to_json(const Window& w);
Window window_from_json(const json& j);
std::string window_id(const Window& w);

json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const json& j);  // dense array or Window document
std::string matrix_id(const Eigen::MatrixXcd& m);

json to_json(const PartitionCertificate& c, const Window* embed = nullptr);
PartitionCertificate partition_from_json(const json& j);

json to_json(const SplitCertificate& c, const Window* embed = nullptr);
SplitCertificate split_from_json(const json& j);

json to_json(const DensityCertificate& c, const Window* embed = nullptr);
DensityCertificate density_from_json(const json& j);

json to_json(const Gamma2Certificate& c);
Gamma2Certificate gamma2_from_json(const json& j);

json to_json(const SignAverage& a, bool with_values = true);

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

}  // namespace lacuna
