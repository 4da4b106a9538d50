#pragma once

#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "tsobs/certify.hpp"
#include "tsobs/conic.hpp"
#include "tsobs/lmi.hpp"
#include "tsobs/simulator.hpp"
#include "tsobs/tsmodel.hpp"

// JSON documents. Matrices are row-major arrays of arrays of finite numbers.
// Loaders validate and throw ModelError carrying a JSON pointer to the first
// violation. Non-finite scalars that are legitimately infinite (certified
// parameter bounds) are written as null.
namespace tsobs::io {

using nlohmann::json;

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& path);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j, const std::string& path);

json to_json(const ParamAffineModel& model);
json to_json(const TSModel& model);
ParamAffineModel param_affine_from_json(const json& j);
TSModel ts_model_from_json(const json& j);

// Dispatches on the document's "kind" ("param_affine" or "takagi_sugeno").
using AnyModel = std::variant<ParamAffineModel, TSModel>;
AnyModel model_from_json(const json& j);
TSModel to_ts_model(const AnyModel& model);

json to_json(const DesignSpec& spec);
DesignSpec design_spec_from_json(const json& j, int n_theta, const std::string& path = "/design");

json to_json(const ObserverDesign& design);
ObserverDesign design_from_json(const json& j, const TSModel& model);

json to_json(const RankReport& report);
json to_json(const CertificationReport& report);
json to_json(const ExcitationDiagnostics& diagnostics);
json to_json(const LyapunovAudit& audit);

json to_json(const InputSignal& signal);
InputSignal input_signal_from_json(const json& j, const std::string& path);
json to_json(const SimScenario& scenario);
SimScenario scenario_from_json(const json& j, const Dimensions& dims, const std::string& path = "/scenario");

// Debug dump of a conic program: variable blocks, cone list and coefficient
// triplets {var, row, col, value} (upper triangle for semidefinite blocks).
json to_json(const ConicProgram& program);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace tsobs::io
