#include "phreg/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace phreg {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::InputError, "cannot write " + path.string());
    out.precision(17);
    return out;
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    auto out = open_out(path);
    const Eigen::Index p = traj.error.empty() ? 0 : traj.error.front().size();
    out << "t";
    for (Eigen::Index k = 1; k <= p; ++k) out << ",re(e_" << k << "),im(e_" << k << ")";
    out << ",err_norm,energy\n";
    for (std::size_t j = 0; j < traj.size(); ++j) {
        out << traj.t[j];
        for (Eigen::Index k = 0; k < p; ++k) out << ',' << traj.error[j](k).real() << ',' << traj.error[j](k).imag();
        out << ',' << traj.err_norm[j] << ',' << traj.energy[j] << '\n';
    }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep) {
    auto out = open_out(path);
    out << "epsilon,abscissa\n";
    for (const auto& r : sweep.rows) out << r.epsilon << ',' << r.abscissa << '\n';
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

nlohmann::json metrics_to_json(const ErrorMetrics& m) {
    nlohmann::json j;
    j["head_sup"] = m.head_sup;
    j["tail_sup"] = m.tail_sup;
    j["tail_to_head"] = m.ratio();
    // JSON has no infinity; a degenerate fit is reported as null
    j["decay_rate"] = m.degenerate ? nlohmann::json(nullptr) : nlohmann::json(m.decay_rate);
    j["degenerate_fit"] = m.degenerate;
    return j;
}

void write_error_svg(const std::filesystem::path& path, const Trajectory& traj, const std::string& title) {
    constexpr double W = 720, Hh = 400, L = 70, R = 20, T = 40, B = 50;
    const double t0 = traj.t.empty() ? 0.0 : traj.t.front();
    const double t1 = traj.t.empty() ? 1.0 : std::max(traj.t.back(), t0 + 1e-12);

    double lo = 1e300, hi = 0.0;
    for (double e : traj.err_norm)
        if (e > 0.0) {
            lo = std::min(lo, e);
            hi = std::max(hi, e);
        }
    if (!(hi > 0.0)) lo = 1e-16, hi = 1.0;
    double dlo = std::floor(std::log10(lo)), dhi = std::ceil(std::log10(hi));
    if (dhi <= dlo) dhi = dlo + 1;

    auto px = [&](double t) { return L + (W - L - R) * (t - t0) / (t1 - t0); };
    auto py = [&](double e) {
        const double le = std::log10(std::max(e, std::pow(10.0, dlo)));
        return T + (Hh - T - B) * (dhi - le) / (dhi - dlo);
    };

    auto out = open_out(path);
    out.precision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
        << title << "</text>\n";
    for (double d = dlo; d <= dhi; d += 1.0) {
        const double y = py(std::pow(10.0, d));
        out << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << y << "\" y2=\"" << y
            << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << L - 6 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << static_cast<int>(d) << "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const double t = t0 + (t1 - t0) * k / 4.0;
        out << "<text x=\"" << px(t) << "\" y=\"" << Hh - B + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << t << "</text>\n";
    }
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << Hh - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">t</text>\n";
    out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << Hh - T - B
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // thin to at most ~2000 vertices
    const std::size_t stride = std::max<std::size_t>(1, traj.size() / 2000);
    out << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.2\" points=\"";
    for (std::size_t j = 0; j < traj.size(); j += stride) out << px(traj.t[j]) << ',' << py(traj.err_norm[j]) << ' ';
    out << "\"/>\n</svg>\n";
}

}  // namespace phreg
