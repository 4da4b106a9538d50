#include "tsobs/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "tsobs/error.hpp"

namespace tsobs::io {

namespace {

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw ModelError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ModelError(path + "/" + key, "missing field");
    return *it;
}

const json* optional_field(const json& j, const char* key) {
    if (!j.is_object()) return nullptr;
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ModelError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ModelError(path, "expected a finite number");
    return v;
}

// Finite number, or null meaning +infinity.
double extended_number(const json& j, const std::string& path) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    return number(j, path);
}

json extended(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ModelError(path, "expected an integer");
    return j.get<int>();
}

const json& array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ModelError(path, "expected an array");
    return j;
}

std::string child(const std::string& path, std::size_t k) { return path + "/" + std::to_string(k); }

Matrix matrix_or_zero(const json& parent, const char* key, const std::string& path, Eigen::Index rows,
                      Eigen::Index cols) {
    const json* j = optional_field(parent, key);
    if (!j) return Matrix::Zero(rows, cols);
    return matrix_from_json(*j, path + "/" + key);
}

Dimensions dimensions_from_json(const json& j) {
    const std::string path = "/dimensions";
    Dimensions d;
    d.n = integer(field(j, "n", path), path + "/n");
    d.n_u = integer(field(j, "n_u", path), path + "/n_u");
    d.n_y = integer(field(j, "n_y", path), path + "/n_y");
    d.n_p = integer(field(j, "n_p", path), path + "/n_p");
    d.n_theta = integer(field(j, "n_theta", path), path + "/n_theta");
    d.validate();
    return d;
}

json to_json(const Dimensions& d) {
    return {{"n", d.n}, {"n_u", d.n_u}, {"n_y", d.n_y}, {"n_p", d.n_p}, {"n_theta", d.n_theta}};
}

std::vector<Premise> premises_from_json(const json& j) {
    std::vector<Premise> out;
    const json& arr = array(j, "/premises");
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string path = child("/premises", k);
        Premise p;
        p.min = number(field(arr[k], "min", path), path + "/min");
        p.max = number(field(arr[k], "max", path), path + "/max");
        p.selector = vector_from_json(field(arr[k], "selector", path), path + "/selector");
        out.push_back(std::move(p));
    }
    return out;
}

json premises_to_json(const std::vector<Premise>& premises) {
    json arr = json::array();
    for (const auto& p : premises) {
        arr.push_back({{"min", p.min}, {"max", p.max}, {"selector", vector_to_json(p.selector)}});
    }
    return arr;
}

json family_to_json(const AffineFamily& f) {
    json slopes = json::array();
    for (const auto& s : f.slopes) slopes.push_back(matrix_to_json(s));
    return {{"base", matrix_to_json(f.base)}, {"slopes", slopes}};
}

// Missing families, bases or slopes default to zero.
AffineFamily family_from_json(const json* j, const std::string& path, Eigen::Index rows, Eigen::Index cols,
                              int n_p) {
    AffineFamily f;
    f.base = Matrix::Zero(rows, cols);
    f.slopes.assign(static_cast<std::size_t>(n_p), Matrix::Zero(rows, cols));
    if (!j) return f;
    if (!j->is_object()) throw ModelError(path, "expected an object with base/slopes");
    f.base = matrix_or_zero(*j, "base", path, rows, cols);
    if (const json* s = optional_field(*j, "slopes")) {
        const json& arr = array(*s, path + "/slopes");
        f.slopes.clear();
        for (std::size_t k = 0; k < arr.size(); ++k) {
            f.slopes.push_back(matrix_from_json(arr[k], child(path + "/slopes", k)));
        }
    }
    return f;
}

json transmission_to_json(const Transmission& t) {
    return {{"A", matrix_to_json(t.A)}, {"B", matrix_to_json(t.B)}, {"F", matrix_to_json(t.F)}};
}

void check_kind(const json& j, const char* expected) {
    const json& kind = field(j, "kind", "");
    if (!kind.is_string() || kind.get<std::string>() != expected) {
        throw ModelError("/kind", std::string("expected \"") + expected + "\"");
    }
}

std::vector<Matrix> matrix_list(const json& j, const std::string& path) {
    std::vector<Matrix> out;
    const json& arr = array(j, path);
    for (std::size_t k = 0; k < arr.size(); ++k) out.push_back(matrix_from_json(arr[k], child(path, k)));
    return out;
}

json matrix_list_to_json(const std::vector<Matrix>& ms) {
    json arr = json::array();
    for (const auto& m : ms) arr.push_back(matrix_to_json(m));
    return arr;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& path) {
    const json& rows = array(j, path);
    if (rows.empty()) return Matrix(0, 0);
    const std::size_t cols = array(rows[0], child(path, 0)).size();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const json& row = array(rows[r], child(path, r));
        if (row.size() != cols) throw ModelError(child(path, r), "ragged matrix row");
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                number(row[c], child(child(path, r), c));
        }
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
    return arr;
}

Vector vector_from_json(const json& j, const std::string& path) {
    const json& arr = array(j, path);
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t k = 0; k < arr.size(); ++k) v(static_cast<Eigen::Index>(k)) = number(arr[k], child(path, k));
    return v;
}

json to_json(const ParamAffineModel& m) {
    json transmission = json::array();
    for (const auto& t : m.transmission) {
        transmission.push_back({{"A", family_to_json(t.A)}, {"B", family_to_json(t.B)}, {"F", family_to_json(t.F)}});
    }
    return {{"kind", "param_affine"},
            {"dimensions", to_json(m.dims)},
            {"premises", premises_to_json(m.premises)},
            {"A", family_to_json(m.A)},
            {"B", family_to_json(m.B)},
            {"F", family_to_json(m.F)},
            {"transmission", transmission},
            {"C", matrix_to_json(m.C)}};
}

ParamAffineModel param_affine_from_json(const json& j) {
    check_kind(j, "param_affine");
    ParamAffineModel m;
    m.dims = dimensions_from_json(field(j, "dimensions", ""));
    const auto& d = m.dims;
    m.premises = premises_from_json(field(j, "premises", ""));
    m.A = family_from_json(&field(j, "A", ""), "/A", d.n, d.n, d.n_p);
    m.B = family_from_json(optional_field(j, "B"), "/B", d.n, d.n_u, d.n_p);
    m.F = family_from_json(optional_field(j, "F"), "/F", d.n, 1, d.n_p);
    if (const json* t = optional_field(j, "transmission")) {
        const json& arr = array(*t, "/transmission");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string path = child("/transmission", k);
            if (!arr[k].is_object()) throw ModelError(path, "expected an object");
            TransmissionFamily tf;
            tf.A = family_from_json(optional_field(arr[k], "A"), path + "/A", d.n, d.n, d.n_p);
            tf.B = family_from_json(optional_field(arr[k], "B"), path + "/B", d.n, d.n_u, d.n_p);
            tf.F = family_from_json(optional_field(arr[k], "F"), path + "/F", d.n, 1, d.n_p);
            m.transmission.push_back(std::move(tf));
        }
    }
    m.C = matrix_from_json(field(j, "C", ""), "/C");
    m.validate();
    return m;
}

json to_json(const TSModel& m) {
    json vertices = json::array();
    for (int i = 0; i < m.dims.r(); ++i) {
        json bits = json::array();
        for (int k = 0; k < m.dims.n_p; ++k) bits.push_back((m.vertex_bits[i] >> k) & 1u);
        json transmission = json::array();
        for (const auto& t : m.transmission[i]) transmission.push_back(transmission_to_json(t));
        vertices.push_back({{"bits", bits},
                            {"A", matrix_to_json(m.A[i])},
                            {"B", matrix_to_json(m.B[i])},
                            {"F", matrix_to_json(m.F[i])},
                            {"transmission", transmission}});
    }
    return {{"kind", "takagi_sugeno"},
            {"dimensions", to_json(m.dims)},
            {"premises", premises_to_json(m.premises)},
            {"vertices", vertices},
            {"C", matrix_to_json(m.C)}};
}

TSModel ts_model_from_json(const json& j) {
    check_kind(j, "takagi_sugeno");
    TSModel m;
    m.dims = dimensions_from_json(field(j, "dimensions", ""));
    const auto& d = m.dims;
    m.premises = premises_from_json(field(j, "premises", ""));
    const json& vertices = array(field(j, "vertices", ""), "/vertices");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const std::string path = child("/vertices", i);
        const json& v = vertices[i];
        if (!v.is_object()) throw ModelError(path, "expected an object");
        if (const json* bits = optional_field(v, "bits")) {
            const json& arr = array(*bits, path + "/bits");
            if (static_cast<int>(arr.size()) != d.n_p) throw ModelError(path + "/bits", "expected n_p bits");
            std::uint32_t mask = 0;
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const int b = integer(arr[k], child(path + "/bits", k));
                if (b != 0 && b != 1) throw ModelError(child(path + "/bits", k), "bits must be 0 or 1");
                mask |= static_cast<std::uint32_t>(b) << k;
            }
            m.vertex_bits.push_back(mask);
        } else {
            const auto defaults = default_vertex_bits(d.n_p);
            if (i >= defaults.size()) throw ModelError("/vertices", "too many submodels");
            m.vertex_bits.push_back(defaults[i]);
        }
        m.A.push_back(matrix_from_json(field(v, "A", path), path + "/A"));
        m.B.push_back(matrix_or_zero(v, "B", path, d.n, d.n_u));
        m.F.push_back(matrix_or_zero(v, "F", path, d.n, 1));
        std::vector<Transmission> row;
        if (const json* t = optional_field(v, "transmission")) {
            const json& arr = array(*t, path + "/transmission");
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const std::string tp = child(path + "/transmission", k);
                if (!arr[k].is_object()) throw ModelError(tp, "expected an object");
                row.push_back({matrix_or_zero(arr[k], "A", tp, d.n, d.n),
                               matrix_or_zero(arr[k], "B", tp, d.n, d.n_u),
                               matrix_or_zero(arr[k], "F", tp, d.n, 1)});
            }
        }
        m.transmission.push_back(std::move(row));
    }
    m.C = matrix_from_json(field(j, "C", ""), "/C");
    m.validate();
    return m;
}

AnyModel model_from_json(const json& j) {
    const json& kind = field(j, "kind", "");
    if (kind == "param_affine") return param_affine_from_json(j);
    if (kind == "takagi_sugeno") return ts_model_from_json(j);
    throw ModelError("/kind", "expected \"param_affine\" or \"takagi_sugeno\"");
}

TSModel to_ts_model(const AnyModel& model) {
    if (const auto* pam = std::get_if<ParamAffineModel>(&model)) return snl_decompose(*pam);
    return std::get<TSModel>(model);
}

json to_json(const DesignSpec& s) {
    json j = {{"objective", to_string(s.objective)},
              {"pd_margin", s.pd_margin},
              {"rho", vector_to_json(s.rho)},
              {"variable_bound", s.variable_bound},
              {"solver",
               {{"gap_tolerance", s.solver.gap_tolerance},
                {"tau_initial", s.solver.tau_initial},
                {"tau_growth", s.solver.tau_growth},
                {"tau_max", s.solver.tau_max},
                {"max_newton_steps", s.solver.max_newton_steps},
                {"newton_tolerance", s.solver.newton_tolerance}}}};
    if (s.theta_bar) j["theta_bar"] = *s.theta_bar;
    return j;
}

DesignSpec design_spec_from_json(const json& j, int n_theta, const std::string& path) {
    if (!j.is_object()) throw ModelError(path, "expected an object");
    DesignSpec s;
    s.rho = Vector::Ones(n_theta);
    if (const json* v = optional_field(j, "theta_bar")) s.theta_bar = number(*v, path + "/theta_bar");
    if (const json* v = optional_field(j, "objective")) {
        if (!v->is_string()) throw ModelError(path + "/objective", "expected a string");
        s.objective = objective_from_string(v->get<std::string>());
    }
    if (const json* v = optional_field(j, "pd_margin")) s.pd_margin = number(*v, path + "/pd_margin");
    if (const json* v = optional_field(j, "rho")) s.rho = vector_from_json(*v, path + "/rho");
    if (const json* v = optional_field(j, "variable_bound")) {
        s.variable_bound = number(*v, path + "/variable_bound");
    }
    if (const json* sv = optional_field(j, "solver")) {
        const std::string sp = path + "/solver";
        if (const json* v = optional_field(*sv, "gap_tolerance")) s.solver.gap_tolerance = number(*v, sp + "/gap_tolerance");
        if (const json* v = optional_field(*sv, "tau_initial")) s.solver.tau_initial = number(*v, sp + "/tau_initial");
        if (const json* v = optional_field(*sv, "tau_growth")) s.solver.tau_growth = number(*v, sp + "/tau_growth");
        if (const json* v = optional_field(*sv, "tau_max")) s.solver.tau_max = number(*v, sp + "/tau_max");
        if (const json* v = optional_field(*sv, "max_newton_steps")) {
            s.solver.max_newton_steps = integer(*v, sp + "/max_newton_steps");
        }
        if (const json* v = optional_field(*sv, "newton_tolerance")) {
            s.solver.newton_tolerance = number(*v, sp + "/newton_tolerance");
        }
        if (!(s.solver.tau_growth > 1.0)) throw ModelError(sp + "/tau_growth", "tau_growth must exceed 1");
    }
    s.validate(n_theta);
    return s;
}

json to_json(const ObserverDesign& d) {
    return {{"objective", to_string(d.objective)},
            {"P", matrix_to_json(d.P)},
            {"Q", matrix_to_json(d.Q)},
            {"M", matrix_list_to_json(d.M)},
            {"L", matrix_list_to_json(d.L)},
            {"gamma", d.gamma},
            {"a_bar", d.a_bar},
            {"theta_bar_max", extended(d.theta_bar_max)},
            {"beta", vector_to_json(d.beta)},
            {"rho", vector_to_json(d.rho)},
            {"C_pinv", matrix_to_json(d.C_pinv)},
            {"H", matrix_to_json(d.H)},
            {"pd_margin", d.pd_margin},
            {"solver",
             {{"outer_iterations", d.stats.outer_iterations},
              {"newton_steps", d.stats.newton_steps},
              {"final_tau", d.stats.final_tau},
              {"gap_bound", d.stats.gap_bound},
              {"phase1_slack", d.stats.phase1_slack}}}};
}

ObserverDesign design_from_json(const json& j, const TSModel& model) {
    const auto& dims = model.dims;
    ObserverDesign d;
    d.objective = objective_from_string(field(j, "objective", "").get<std::string>());
    d.P = matrix_from_json(field(j, "P", ""), "/P");
    d.Q = matrix_from_json(field(j, "Q", ""), "/Q");
    d.M = matrix_list(field(j, "M", ""), "/M");
    d.L = matrix_list(field(j, "L", ""), "/L");
    d.gamma = number(field(j, "gamma", ""), "/gamma");
    d.a_bar = number(field(j, "a_bar", ""), "/a_bar");
    d.theta_bar_max = extended_number(field(j, "theta_bar_max", ""), "/theta_bar_max");
    d.beta = vector_from_json(field(j, "beta", ""), "/beta");
    d.rho = vector_from_json(field(j, "rho", ""), "/rho");
    d.C_pinv = matrix_from_json(field(j, "C_pinv", ""), "/C_pinv");
    d.H = matrix_from_json(field(j, "H", ""), "/H");
    d.pd_margin = number(field(j, "pd_margin", ""), "/pd_margin");
    if (const json* s = optional_field(j, "solver")) {
        d.stats.outer_iterations = s->value("outer_iterations", 0);
        d.stats.newton_steps = s->value("newton_steps", 0);
        d.stats.final_tau = s->value("final_tau", 0.0);
        d.stats.gap_bound = s->value("gap_bound", 0.0);
        d.stats.phase1_slack = s->value("phase1_slack", 0.0);
    }

    const auto square = [&](const Matrix& m, const char* path) {
        if (m.rows() != dims.n || m.cols() != dims.n) throw ModelError(path, "expected n x n matrix");
    };
    square(d.P, "/P");
    square(d.Q, "/Q");
    square(d.H, "/H");
    if (static_cast<int>(d.M.size()) != dims.r()) throw ModelError("/M", "expected one matrix per submodel");
    if (static_cast<int>(d.L.size()) != dims.r()) throw ModelError("/L", "expected one matrix per submodel");
    for (int i = 0; i < dims.r(); ++i) {
        if (d.M[i].rows() != dims.n || d.M[i].cols() != dims.n_y) {
            throw ModelError("/M/" + std::to_string(i), "expected n x n_y matrix");
        }
        if (d.L[i].rows() != dims.n || d.L[i].cols() != dims.n_y) {
            throw ModelError("/L/" + std::to_string(i), "expected n x n_y matrix");
        }
    }
    if (d.C_pinv.rows() != dims.n || d.C_pinv.cols() != dims.n_y) {
        throw ModelError("/C_pinv", "expected n x n_y matrix");
    }
    if (d.beta.size() != dims.n_theta) throw ModelError("/beta", "expected n_theta entries");
    if (d.rho.size() != dims.n_theta) throw ModelError("/rho", "expected n_theta entries");
    return d;
}

json to_json(const RankReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"submodel", e.submodel + 1},
                           {"parameter", e.parameter + 1},
                           {"matrix", std::string(1, e.which) + "bar"},
                           {"zero", e.zero},
                           {"rank", e.rank},
                           {"rank_with_C", e.rank_with_C},
                           {"full_column_rank", e.full_column_rank},
                           {"rank_preserved", e.rank_preserved},
                           {"pass", e.passes()}});
    }
    return {{"theorem1_applicable", report.rank_conditions_hold}, {"entries", entries}};
}

json to_json(const CertificationReport& report) {
    json conditions = json::array();
    for (const auto& c : report.conditions) {
        conditions.push_back({{"id", c.id},
                              {"margin", extended(c.margin)},
                              {"pass", c.pass},
                              {"tolerance", c.tolerance},
                              {"mandatory", c.mandatory},
                              {"detail", c.detail}});
    }
    return {{"overall_pass", report.overall_pass},
            {"theta_bar_certified", extended(report.theta_bar_certified)},
            {"conditions", conditions}};
}

json to_json(const ExcitationDiagnostics& d) {
    return {{"mu_min", vector_to_json(d.mu_min)},
            {"mu_max", vector_to_json(d.mu_max)},
            {"mu_variance", vector_to_json(d.mu_variance)},
            {"regressor_mean_square", vector_to_json(d.regressor_mean_square)},
            {"regressor_min_window_energy", vector_to_json(d.regressor_min_window_energy)},
            {"window", d.window},
            {"window_count", d.window_count},
            {"saturated_samples", d.saturated_samples}};
}

json to_json(const LyapunovAudit& a) {
    return {{"t_begin", a.t_begin},
            {"t_end", a.t_end},
            {"samples", a.samples},
            {"steps", a.steps},
            {"tolerance", a.tolerance},
            {"max_increase", a.max_increase},
            {"violation_fraction", a.violation_fraction},
            {"nonincreasing_fraction", a.nonincreasing_fraction},
            {"saturated_samples", a.saturated_samples},
            {"V_initial", a.V_initial},
            {"V_final", a.V_final}};
}

json to_json(const InputSignal& s) {
    switch (s.kind) {
        case InputSignal::Kind::Zero: return {{"type", "zero"}};
        case InputSignal::Kind::Constant: return {{"type", "constant"}, {"value", s.value}};
        case InputSignal::Kind::Multisine:
            return {{"type", "multisine"},
                    {"amplitudes", s.amplitudes},
                    {"frequencies", s.frequencies},
                    {"phases", s.phases}};
        case InputSignal::Kind::Prbs:
            return {{"type", "prbs"}, {"amplitude", s.value}, {"dwell", s.dwell}, {"seed", s.seed}};
    }
    return {};
}

InputSignal input_signal_from_json(const json& j, const std::string& path) {
    const json& type = field(j, "type", path);
    if (!type.is_string()) throw ModelError(path + "/type", "expected a string");
    const std::string t = type.get<std::string>();
    const auto list = [&](const char* key) {
        std::vector<double> out;
        const Vector v = vector_from_json(field(j, key, path), path + "/" + key);
        out.assign(v.data(), v.data() + v.size());
        return out;
    };
    InputSignal s;
    if (t == "zero") {
        s = InputSignal::zero();
    } else if (t == "constant") {
        s = InputSignal::constant(number(field(j, "value", path), path + "/value"));
    } else if (t == "multisine") {
        auto amplitudes = list("amplitudes");
        auto frequencies = list("frequencies");
        std::vector<double> phases(amplitudes.size(), 0.0);
        if (optional_field(j, "phases")) phases = list("phases");
        s = InputSignal::multisine(std::move(amplitudes), std::move(frequencies), std::move(phases));
    } else if (t == "prbs") {
        std::uint64_t seed = 42;
        if (const json* v = optional_field(j, "seed")) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
                throw ModelError(path + "/seed", "expected a non-negative integer");
            }
            seed = v->get<std::uint64_t>();
        }
        s = InputSignal::prbs(number(field(j, "amplitude", path), path + "/amplitude"),
                              number(field(j, "dwell", path), path + "/dwell"), seed);
    } else {
        throw ModelError(path + "/type", "unknown signal type '" + t + "'");
    }
    s.validate(path);
    return s;
}

json to_json(const SimScenario& s) {
    json profile = json::array();
    for (const auto& bp : s.theta_profile) profile.push_back({{"t", bp.t}, {"theta", vector_to_json(bp.theta)}});
    json inputs = json::array();
    for (const auto& in : s.inputs) inputs.push_back(to_json(in));
    return {{"t_end", s.t_end},
            {"dt", s.dt},
            {"x0", vector_to_json(s.x0)},
            {"xhat0", vector_to_json(s.xhat0)},
            {"thetahat0", vector_to_json(s.thetahat0)},
            {"theta_profile", profile},
            {"input", inputs},
            {"rho", vector_to_json(s.rho)},
            {"record_stride", s.record_stride},
            {"excitation_window", s.excitation_window}};
}

SimScenario scenario_from_json(const json& j, const Dimensions& dims, const std::string& path) {
    if (!j.is_object()) throw ModelError(path, "expected an object");
    SimScenario s;
    s.x0 = Vector::Zero(dims.n);
    s.xhat0 = Vector::Zero(dims.n);
    s.thetahat0 = Vector::Zero(dims.n_theta);
    s.theta_profile = {{0.0, Vector::Zero(dims.n_theta)}};
    s.inputs.assign(static_cast<std::size_t>(dims.n_u), InputSignal::zero());
    s.rho = Vector::Ones(dims.n_theta);
    if (const json* v = optional_field(j, "t_end")) s.t_end = number(*v, path + "/t_end");
    if (const json* v = optional_field(j, "dt")) s.dt = number(*v, path + "/dt");
    if (const json* v = optional_field(j, "x0")) s.x0 = vector_from_json(*v, path + "/x0");
    if (const json* v = optional_field(j, "xhat0")) s.xhat0 = vector_from_json(*v, path + "/xhat0");
    if (const json* v = optional_field(j, "thetahat0")) s.thetahat0 = vector_from_json(*v, path + "/thetahat0");
    if (const json* v = optional_field(j, "theta_profile")) {
        const std::string pp = path + "/theta_profile";
        const json& arr = array(*v, pp);
        s.theta_profile.clear();
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string bp = child(pp, k);
            s.theta_profile.push_back({number(field(arr[k], "t", bp), bp + "/t"),
                                       vector_from_json(field(arr[k], "theta", bp), bp + "/theta")});
        }
    }
    if (const json* v = optional_field(j, "input")) {
        const std::string ip = path + "/input";
        if (v->is_array()) {
            s.inputs.clear();
            for (std::size_t k = 0; k < v->size(); ++k) s.inputs.push_back(input_signal_from_json((*v)[k], child(ip, k)));
        } else {
            s.inputs.assign(static_cast<std::size_t>(dims.n_u), input_signal_from_json(*v, ip));
        }
    }
    if (const json* v = optional_field(j, "rho")) s.rho = vector_from_json(*v, path + "/rho");
    if (const json* v = optional_field(j, "record_stride")) s.record_stride = integer(*v, path + "/record_stride");
    if (const json* v = optional_field(j, "excitation_window")) {
        s.excitation_window = number(*v, path + "/excitation_window");
    }
    s.validate(dims);
    return s;
}

json to_json(const ConicProgram& p) {
    json blocks = json::array();
    for (const auto& b : p.blocks) {
        const char* kind = b.kind == VariableBlock::Kind::Symmetric ? "symmetric"
                           : b.kind == VariableBlock::Kind::Full    ? "full"
                                                                    : "scalar";
        blocks.push_back({{"name", b.name},
                          {"kind", kind},
                          {"rows", b.rows},
                          {"cols", b.cols},
                          {"offset", b.offset},
                          {"size", b.size()}});
    }
    json cones = json::array();
    for (const auto& lmi : p.lmis) {
        json constant = json::array();
        for (Eigen::Index r = 0; r < lmi.constant.rows(); ++r) {
            for (Eigen::Index c = r; c < lmi.constant.cols(); ++c) {
                if (lmi.constant(r, c) != 0.0) constant.push_back({r, c, lmi.constant(r, c)});
            }
        }
        json triplets = json::array();
        for (const auto& t : lmi.terms) {
            for (Eigen::Index r = 0; r < t.coef.rows(); ++r) {
                for (Eigen::Index c = r; c < t.coef.cols(); ++c) {
                    if (t.coef(r, c) != 0.0) triplets.push_back({t.var, r, c, t.coef(r, c)});
                }
            }
        }
        cones.push_back({{"type", "psd"},
                         {"name", lmi.name},
                         {"dim", lmi.dim()},
                         {"constant", constant},
                         {"coefficients", triplets}});
    }
    for (const auto& soc : p.socs) {
        json v_triplets = json::array();
        for (Eigen::Index r = 0; r < soc.v_coef.rows(); ++r) {
            for (Eigen::Index c = 0; c < soc.v_coef.cols(); ++c) {
                if (soc.v_coef(r, c) != 0.0) v_triplets.push_back({c, r, soc.v_coef(r, c)});
            }
        }
        json t_terms = json::array();
        for (Eigen::Index c = 0; c < soc.t_coef.size(); ++c) {
            if (soc.t_coef(c) != 0.0) t_terms.push_back({c, soc.t_coef(c)});
        }
        json cone = {{"type", "soc"},
                     {"name", soc.name},
                     {"dim", soc.v_coef.rows() + 1},
                     {"t_coefficients", t_terms},
                     {"t_constant", soc.t_const},
                     {"v_coefficients", v_triplets},
                     {"v_constant", vector_to_json(soc.v_const)}};
        if (soc.epigraph_var) cone["epigraph_var"] = *soc.epigraph_var;
        cones.push_back(std::move(cone));
    }
    json objective = json::array();
    for (Eigen::Index c = 0; c < p.objective.size(); ++c) {
        if (p.objective(c) != 0.0) objective.push_back({c, p.objective(c)});
    }
    return {{"format", "tsobs-conic-v1"},
            {"sense", "minimize"},
            {"num_vars", p.num_vars},
            {"variables", blocks},
            {"objective", objective},
            {"cones", cones}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("", "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ModelError("", "'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace tsobs::io
