#include "phyp/report_io.hpp"

#include "phyp/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace phyp {

namespace {

RateFit::Status rate_status_from(const std::string& s)
{
    if (s == "ok")
        return RateFit::Status::ok;
    if (s == "converged_immediately")
        return RateFit::Status::converged_immediately;
    return RateFit::Status::insufficient_data;
}

void write_json(const Json& j, const std::filesystem::path& dest)
{
    write_text(dest, j.dump(2) + "\n");
}

} // namespace

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string rate_status_name(RateFit::Status s)
{
    switch (s) {
    case RateFit::Status::ok: return "ok";
    case RateFit::Status::converged_immediately: return "converged_immediately";
    default: return "insufficient_data";
    }
}

void to_json(Json& j, const FieldNorms& r)
{
    j = Json{{"c0", r.c0}, {"c1", r.c1}};
}

void from_json(const Json& j, FieldNorms& r)
{
    r.c0 = j.at("c0").get<double>();
    r.c1 = j.at("c1").get<double>();
}

void to_json(Json& j, const Certificate& r)
{
    j = Json{{"theta", r.theta}, {"k", r.K}, {"l", r.L}, {"m3", r.M3}, {"ok", r.ok}, {"margin", r.margin}};
}

void from_json(const Json& j, Certificate& r)
{
    r.theta = j.at("theta").get<double>();
    r.K = j.at("k").get<double>();
    r.L = j.at("l").get<double>();
    r.M3 = j.at("m3").get<double>();
    r.ok = j.at("ok").get<bool>();
    r.margin = j.at("margin").get<double>();
}

void to_json(Json& j, const RegularityReport& r)
{
    j = Json{{"d2t", r.d2t}, {"dtdx", r.dtdx}, {"d2x", r.d2x}};
    j["grid_pair_ratio"] = r.grid_pair_ratio ? Json(*r.grid_pair_ratio) : Json(nullptr);
    j["forcing_second_derivative_bound"]
        = r.forcing_second_derivative_bound ? Json(*r.forcing_second_derivative_bound) : Json(nullptr);
}

void from_json(const Json& j, RegularityReport& r)
{
    r.d2t = j.at("d2t").get<double>();
    r.dtdx = j.at("dtdx").get<double>();
    r.d2x = j.at("d2x").get<double>();
    r.grid_pair_ratio.reset();
    r.forcing_second_derivative_bound.reset();
    if (j.contains("grid_pair_ratio") && !j["grid_pair_ratio"].is_null())
        r.grid_pair_ratio = j["grid_pair_ratio"].get<std::array<double, 3>>();
    if (j.contains("forcing_second_derivative_bound") && !j["forcing_second_derivative_bound"].is_null())
        r.forcing_second_derivative_bound = j["forcing_second_derivative_bound"].get<double>();
}

void to_json(Json& j, const RateFit& r)
{
    j = Json{{"status", rate_status_name(r.status)}, {"beta", r.beta}, {"points", r.points}};
}

void from_json(const Json& j, RateFit& r)
{
    r.status = rate_status_from(j.at("status").get<std::string>());
    r.beta = j.at("beta").get<double>();
    r.points = j.at("points").get<int>();
}

void to_json(Json& j, const ValidationReport& r)
{
    j = Json{{"samples", r.samples},
             {"signature_constant", r.signature_constant},
             {"mu_max", r.mu_max},
             {"needs_rescaling", r.needs_rescaling},
             {"a0_diagonal", r.a0_diagonal},
             {"f0_zero", r.f0_zero},
             {"max_eigen_residual", r.max_eigen_residual},
             {"max_biorthonormality_error", r.max_biorthonormality_error}};
}

void from_json(const Json& j, ValidationReport& r)
{
    r.samples = j.at("samples").get<int>();
    r.signature_constant = j.at("signature_constant").get<bool>();
    r.mu_max = j.at("mu_max").get<double>();
    r.needs_rescaling = j.at("needs_rescaling").get<bool>();
    r.a0_diagonal = j.at("a0_diagonal").get<bool>();
    r.f0_zero = j.at("f0_zero").get<bool>();
    r.max_eigen_residual = j.at("max_eigen_residual").get<double>();
    r.max_biorthonormality_error = j.at("max_biorthonormality_error").get<double>();
}

void to_json(Json& j, const IterationReport& r)
{
    j = Json{{"iterations", r.iterations},
             {"converged", r.converged},
             {"fitted_beta", r.fitted_beta},
             {"certificate", r.certificate},
             {"deltas", r.deltas},
             {"c1_deltas", r.c1_deltas}};
}

void to_json(Json& j, const StabilityReport& r)
{
    j = Json{{"t0", r.T0},
             {"exact_match", r.exact_match},
             {"monotone_envelope", r.monotone_envelope},
             {"fitted_decay", r.fitted_decay},
             {"fitted_derivative_decay", r.fitted_derivative_decay}};
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError(path.string(), "cannot open for writing");
    out << text;
    out.flush();
    if (!out)
        throw IoError(path.string(), "write failed");
}

void emit_report(const IterationReport& r, ReportFormat format, const std::filesystem::path& dest)
{
    if (format == ReportFormat::json) {
        write_json(Json(r), dest);
        return;
    }
    std::ostringstream os;
    os << "iteration,delta\n";
    for (std::size_t l = 0; l < r.deltas.size(); ++l)
        os << l + 1 << ',' << format_real(r.deltas[l]) << '\n';
    write_text(dest, os.str());
}

void emit_report(const StabilityReport& r, ReportFormat format, const std::filesystem::path& dest)
{
    if (format == ReportFormat::json) {
        write_json(Json(r), dest);
        return;
    }
    std::ostringstream os;
    os << "t,phi,dphi\n";
    for (std::size_t q = 0; q < r.phi_samples.size(); ++q)
        os << format_real(r.phi_samples[q].first) << ',' << format_real(r.phi_samples[q].second) << ','
           << format_real(r.dphi_samples[q].second) << '\n';
    write_text(dest, os.str());
    auto sidecar = dest;
    sidecar.replace_extension(".json");
    write_json(Json(r), sidecar);
}

void emit_report(const ValidationReport& r, const std::filesystem::path& dest)
{
    write_json(Json(r), dest);
}

void emit_report(const Certificate& r, const std::filesystem::path& dest)
{
    write_json(Json(r), dest);
}

void emit_report(const RegularityReport& r, const std::filesystem::path& dest)
{
    write_json(Json(r), dest);
}

void emit_report(const FieldNorms& r, const std::filesystem::path& dest)
{
    write_json(Json(r), dest);
}

void emit_field(const Field& field, const std::filesystem::path& dest)
{
    std::ostringstream os;
    os << "t,x";
    for (int i = 0; i < field.n(); ++i)
        os << ",u" << i + 1;
    os << '\n';
    for (int j = 0; j < field.Nt(); ++j)
        for (int k = 0; k <= field.Nx(); ++k) {
            os << format_real(field.t(j)) << ',' << format_real(field.x(k));
            for (int i = 0; i < field.n(); ++i)
                os << ',' << format_real(field(i, j, k));
            os << '\n';
        }
    write_text(dest, os.str());
}

} // namespace phyp
