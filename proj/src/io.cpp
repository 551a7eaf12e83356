#include "srl/io.hpp"

#include <openssl/evp.h>


#include <cstdio>
#include <fstream>
#include <sstream>

namespace srl::io {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file " + path.string());
    out << content;
    if (!out) throw ConfigError("failed writing " + path.string());
}

json params_to_json(const PhysicalParams& p) {
    return json{{"units", "ordinary Hz; internal rates are angular, divided by 2*pi here"},
                {"gamma_hz", angular_to_hz(p.gamma)},
                {"kappa_hz", angular_to_hz(p.kappa)},
                {"g_hz", angular_to_hz(p.g)},
                {"chi_hz", angular_to_hz(p.chi)},
                {"eta_hz", angular_to_hz(p.eta)},
                {"delta_hz", angular_to_hz(p.delta)},
                {"n_atoms", p.n_atoms}};
}

std::string finalize_csv(const json& config, const std::string& body) {
    std::ostringstream out;
    out << "# config: " << config.dump() << "\n";
    out << "# sha256: " << sha256_hex(body) << "\n";
    out << body;
    return out.str();
}

std::string finalize_json(const json& config, const json& data) {
    json envelope;
    envelope["config"] = config;
    envelope["content_sha256"] = sha256_hex(data.dump());
    envelope["data"] = data;
    return envelope.dump(2) + "\n";
}

std::string trajectory_csv(const Trajectory& traj, const json& config) {
    std::ostringstream body;
    body << "t,n_photon,coherence_re,coherence_im,sigma_z,spin_corr_re,spin_corr_im\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto& s = traj.states[k];
        body << format_double(traj.times[k]) << ',' << format_double(s.n_photon) << ','
             << format_double(s.coherence.real()) << ',' << format_double(s.coherence.imag())
             << ',' << format_double(s.inversion) << ',' << format_double(s.spin_corr.real())
             << ',' << format_double(s.spin_corr.imag()) << "\n";
    }
    return finalize_csv(config, body.str());
}

json trajectory_json_data(const Trajectory& traj) {
    json data;
    data["params"] = params_to_json(traj.params);
    auto& times = data["times_s"] = json::array();
    auto& states = data["states"] = json::array();
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        times.push_back(traj.times[k]);
        const auto& s = traj.states[k];
        states.push_back({{"n_photon", s.n_photon},
                          {"coherence_re", s.coherence.real()},
                          {"coherence_im", s.coherence.imag()},
                          {"sigma_z", s.inversion},
                          {"spin_corr_re", s.spin_corr.real()},
                          {"spin_corr_im", s.spin_corr.imag()}});
    }
    return data;
}

std::string spectrum_csv(const Spectrum& spec, const json& config) {
    std::ostringstream body;
    body << "freq_hz,psd\n";
    for (std::size_t k = 0; k < spec.freqs_hz.size(); ++k) {
        body << format_double(spec.freqs_hz[k]) << ',' << format_double(spec.psd[k]) << "\n";
    }
    return finalize_csv(config, body.str());
}

json linewidth_json_data(const LinewidthResult& res, bool include_spectrum) {
    json data;
    data["fwhm_hz"] = res.fwhm_hz;
    data["fit"] = {{"amplitude", res.fit.amplitude},
                   {"center_hz", res.fit.center_hz},
                   {"hwhm_hz", res.fit.hwhm_hz},
                   {"fwhm_hz", res.fit.fwhm_hz},
                   {"rms_residual_rel", res.fit.rms_residual_rel},
                   {"iterations", res.fit.iterations}};
    data["steady"] = {{"n_photon", res.steady.n_photon},
                      {"sigma_z", res.steady.inversion},
                      {"coherence_im", res.steady.coherence.imag()},
                      {"spin_corr_re", res.steady.spin_corr.real()}};
    data["regression"] = {{"lambda_slow_re", res.modes.lambda_slow.real()},
                          {"lambda_slow_im", res.modes.lambda_slow.imag()},
                          {"lambda_fast_re", res.modes.lambda_fast.real()},
                          {"lambda_fast_im", res.modes.lambda_fast.imag()},
                          {"dt_s", res.dt},
                          {"t_max_s", res.t_max},
                          {"n_samples", res.n_samples},
                          {"window_fwhm_hz", res.window_fwhm_hz}};
    if (include_spectrum && res.spectrum) {
        auto& freqs = data["spectrum"]["freq_hz"] = json::array();
        auto& psd = data["spectrum"]["psd"] = json::array();
        for (std::size_t k = 0; k < res.spectrum->freqs_hz.size(); ++k) {
            freqs.push_back(res.spectrum->freqs_hz[k]);
            psd.push_back(res.spectrum->psd[k]);
        }
        if (!res.spectrum->truncation_warning.empty()) {
            data["spectrum"]["truncation_warning"] = res.spectrum->truncation_warning;
        }
    }
    return data;
}

std::string spectrum_svg(const Spectrum& spec, const LorentzianFit& fit) {
    const int W = 860, H = 520, ml = 70, mr = 20, mt = 20, mb = 50;
    const int pw = W - ml - mr, ph = H - mt - mb;
    // plot a +-25 half-width window around the fitted line
    const double span = 25.0 * std::max(fit.hwhm_hz, spec.df_hz);
    const double f0 = fit.center_hz - span, f1 = fit.center_hz + span;
    double pmax = 0.0;
    for (std::size_t k = 0; k < spec.freqs_hz.size(); ++k) {
        if (spec.freqs_hz[k] >= f0 && spec.freqs_hz[k] <= f1) {
            pmax = std::max(pmax, spec.psd[k]);
        }
    }
    if (pmax <= 0.0) pmax = 1.0;
    auto xm = [&](double f) { return ml + pw * (f - f0) / (f1 - f0); };
    auto ym = [&](double v) { return mt + ph * (1.0 - v / (1.05 * pmax)); };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
        << "' fill='none' stroke='black'/>\n";
    // data polyline
    svg << "<polyline fill='none' stroke='#1f77b4' stroke-width='1.5' points='";
    for (std::size_t k = 0; k < spec.freqs_hz.size(); ++k) {
        const double f = spec.freqs_hz[k];
        if (f < f0 || f > f1) continue;
        svg << format_double(xm(f)) << ',' << format_double(ym(std::max(spec.psd[k], 0.0)))
            << ' ';
    }
    svg << "'/>\n";
    // fitted curve
    svg << "<polyline fill='none' stroke='#d62728' stroke-width='1.2' "
           "stroke-dasharray='6,4' points='";
    for (int i = 0; i <= 400; ++i) {
        const double f = f0 + (f1 - f0) * i / 400.0;
        const double v =
            fit.amplitude / pi * fit.hwhm_hz /
            ((f - fit.center_hz) * (f - fit.center_hz) + fit.hwhm_hz * fit.hwhm_hz);
        svg << format_double(xm(f)) << ',' << format_double(ym(v)) << ' ';
    }
    svg << "'/>\n";
    svg << "<text x='" << ml + pw / 2 << "' y='" << H - 12
        << "' text-anchor='middle' font-size='14'>offset from carrier (Hz)</text>\n";
    svg << "<text x='" << 18 << "' y='" << mt + ph / 2
        << "' text-anchor='middle' font-size='14' transform='rotate(-90 18 " << mt + ph / 2
        << ")'>power spectral density (arb.)</text>\n";
    svg << "<text x='" << ml + 10 << "' y='" << mt + 18 << "' font-size='13'>FWHM = "
        << format_double(fit.fwhm_hz) << " Hz</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace srl::io
