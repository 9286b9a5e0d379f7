#include "etd_app/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "etd/parallel.hpp"
#include "etd/rng.hpp"
#include "etd_app/io.hpp"

namespace etd::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string probe_file(std::size_t j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "probe_%03zu.csv", j);
    return std::string("data/") + buf;
}

json point_json(const Point& p) {
    json a = json::array();
    for (int i = 0; i < p.d; ++i) a.push_back(p[i]);
    return a;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= a.size();
    mb /= b.size();
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return saa > 0 && sbb > 0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

Point shifted(const Point& x, int axis, double h) {
    Point y = x;
    y[axis] += h;
    return y;
}

bool density_contrast(const TrialInclusion& t) { return t.emtp.is_zero(); }

// Per-image summary: argmax, distance to za, FWHM along each axis.
json image_summary(const ImageGrid& img, const SearchGrid& grid, const Point& za, double lambda) {
    json s;
    const std::size_t im = img.argmax();
    const Point zmax = grid.points[im];
    bool within = true;
    for (int i = 0; i < grid.d; ++i) within = within && std::abs(zmax[i] - za[i]) <= grid.h * (1.0 + 1e-9);
    s["argmax"] = point_json(zmax);
    s["argmax_index"] = im;
    s["argmax_within_one_cell"] = within;
    s["max"] = img.max();
    s["min"] = img.min();
    json fw = json::array(), fwl = json::array();
    for (int a = 0; a < grid.d; ++a) {
        try {
            const double w = fwhm(img, grid, za, a);
            fw.push_back(w);
            fwl.push_back(w / lambda);
        } catch (const std::exception&) {
            fw.push_back(nullptr);
            fwl.push_back(nullptr);
        }
    }
    s["fwhm"] = fw;
    s["fwhm_over_wavelength"] = fwl;
    return s;
}

json stat(const std::string& name, double predicted, const Estimate& e, double k = 3.0) {
    return {{"name", name},
            {"predicted", predicted},
            {"empirical", e.value},
            {"stderr", e.se},
            {"pass", e.se > 0.0 && e.within(predicted, k)}};
}

std::string short_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string csv_row(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += fmt_real(v[i]) + (i + 1 == v.size() ? "\n" : ",");
    return s;
}

}  // namespace

const char* version() { return ETD_VERSION; }

ExperimentConfig apply_overrides(ExperimentConfig c, const Overrides& o) {
    if (o.out) c.output.dir = *o.out;
    if (o.seed) c.mc.seed = *o.seed;
    if (o.trials) c.mc.trials = *o.trials;
    validate_config(c);
    return c;
}

json cmd_simulate(const ExperimentConfig& c, int threads) {
    const Medium med = make_medium(c);
    const Inclusion inc = make_inclusion(c);
    const auto grid = make_boundary(c);
    const auto probes = make_probe_set(c);
    const std::string out = c.output.dir;
    parallel_for(probes.size(), threads, [&](std::size_t j) {
        auto f = filtered_data(med, inc, probes[j], grid);
        if (c.noise.sigma_noise > 0.0)
            f = add_measurement_noise(f, grid, c.noise.sigma_noise, derive_seed(c.mc.seed, j, 0, 3));
        atomic_write(join(out, probe_file(j)), field_csv(grid, f));
    });
    json m;
    m["format"] = "etd-data/1";
    m["version"] = version();
    m["config_hash"] = config_hash(c);
    m["seed"] = c.mc.seed;
    m["config"] = to_json(c);
    m["boundary_nodes"] = grid.size();
    m["probes"] = json::array();
    for (std::size_t j = 0; j < probes.size(); ++j)
        m["probes"].push_back({{"file", probe_file(j)},
                               {"mode", mode_name(probes[j].mode)},
                               {"direction", point_json(probes[j].direction)},
                               {"polarization", point_json(probes[j].polarization)}});
    m["warnings"] = config_warnings(c);
    write_json(join(out, "manifest.json"), m);
    return m;
}

json cmd_image(const ExperimentConfig& c, const std::string& data_dir, int threads) {
    const json man = read_json(join(data_dir, "manifest.json"));
    const std::string want = config_hash(c);
    if (!man.contains("config_hash") || man["config_hash"] != want) {
        std::vector<std::string> diff;
        if (man.contains("config")) {
            try {
                diff = json_diff(numerics_json(parse_config(man["config"])), numerics_json(c));
            } catch (const std::exception& e) {
                diff.push_back(std::string("manifest config unreadable: ") + e.what());
            }
        }
        throw ManifestMismatch(data_dir + ": manifest hash " + (man.contains("config_hash") ? man["config_hash"].dump() : "(none)") +
                                   " does not match config hash \"" + want + "\"",
                               diff);
    }
    const Medium med = make_medium(c);
    const Inclusion inc = make_inclusion(c);
    const TrialInclusion trial = make_trial(c);
    const auto grid = make_boundary(c);
    const auto probes = make_probe_set(c);
    const auto targets = make_search(c);
    const Mode mode = probe_mode(c);

    std::vector<ComplexVecField> data(probes.size());
    parallel_for(probes.size(), threads, [&](std::size_t j) {
        const std::string p = join(data_dir, probe_file(j));
        data[j] = parse_field_csv(read_file(p), grid, p);
    });

    const auto iwf_img = iwf(med, trial, probes, data, grid, targets, threads);
    const auto itd_img = itd_mean(med, trial, probes, data, grid, targets, threads);
    const auto pred = density_contrast(trial)
                          ? predicted_peak(med, mode, contrast_constant(med, inc, trial, c.dim), inc.za, targets)
                          : predicted_peak_elastic(med, mode, inc, targets);
    std::vector<double> coupling(targets.size());
    parallel_for(targets.size(), threads,
                 [&](std::size_t t) { coupling[t] = coupling_strength(med, targets.points[t] - inc.za); });

    const std::string out = c.output.dir;
    write_image(out, "itd", targets, itd_img.values, c.output.formats);
    write_image(out, "iwf", targets, iwf_img.values, c.output.formats);
    write_image(out, "predicted_peak", targets, pred.values, c.output.formats);
    write_image(out, "coupling", targets, coupling, c.output.formats);

    const double lam = med.wavelength(mode);
    json s;
    s["config_hash"] = want;
    s["version"] = version();
    s["probe_mode"] = mode_name(mode);
    s["n_probes"] = probes.size();
    s["za"] = point_json(inc.za);
    s["wavelength"] = lam;
    s["search"] = {{"nodes_per_axis", targets.n[0]}, {"spacing", targets.h}};
    s["images"]["iwf"] = image_summary(iwf_img, targets, inc.za, lam);
    s["images"]["itd"] = image_summary(itd_img, targets, inc.za, lam);
    s["images"]["predicted_peak"] = image_summary(pred, targets, inc.za, lam);
    s["correlation_iwf_predicted"] = pearson(iwf_img.values, pred.values);
    s["correlation_itd_iwf"] = pearson(itd_img.values, iwf_img.values);
    s["coupling_strength_at_za"] = coupling_strength(med, zero_point(c.dim));
    s["warnings"] = config_warnings(c);
    write_json(join(out, "summary.json"), s);
    return s;
}

json cmd_mc_noise(const ExperimentConfig& c, int threads) {
    const bool meas = c.noise.sigma_noise > 0.0, medium = c.noise.medium.sigma_gamma > 0.0;
    if (!meas && !medium)
        throw ConfigError("noise: mc-noise needs noise.sigma_noise > 0 or noise.medium.sigma_gamma > 0");
    const Medium med = make_medium(c);
    const Inclusion inc = make_inclusion(c);
    const TrialInclusion trial = make_trial(c);
    const auto grid = make_boundary(c);
    const auto probes = make_probe_set(c);
    const Mode mode = probe_mode(c);
    const int n = c.probes.directions;
    const int trials = c.mc.trials;
    const double lam = med.wavelength(mode);
    const std::string out = c.output.dir;
    const bool density = density_contrast(trial);

    json rep;
    rep["config_hash"] = config_hash(c);
    rep["version"] = version();
    rep["trials"] = trials;
    rep["seed"] = c.mc.seed;
    rep["statistics"] = json::array();
    rep["alternatives"] = json::array();

    if (meas) {
        const double sigma = c.noise.sigma_noise;
        const std::vector<double> lags{0.0, 0.1, 0.25, 0.5, 1.0};
        std::vector<Point> pts;
        for (double l : lags) pts.push_back(shifted(inc.za, 0, l * lam));
        const auto pairs = make_point_set(pts);

        // backpropagated speckle against the predicted covariance
        const auto sp = measurement_speckle(med, mode, grid, pairs, sigma, trials, derive_seed(c.mc.seed, 0, 0, 6), threads);
        std::string prof = "lag";
        for (int j = 0; j < c.dim; ++j) {
            const std::string jj = std::to_string(j) + std::to_string(j);
            prof += ",empirical_" + jj + ",stderr_" + jj + ",predicted_" + jj;
        }
        prof += "\n";
        for (std::size_t b = 0; b < pts.size(); ++b) {
            const auto P = predicted_speckle_cov(med, mode, sigma, pts[0], pts[b]);
            std::vector<double> row{lags[b] * lam};
            for (int j = 0; j < c.dim; ++j) {
                const auto e = speckle_covariance(sp, 0, b, j, j);
                rep["statistics"].push_back(stat("speckle_cov_" + std::to_string(j) + std::to_string(j) + "_lag" +
                                                     short_real(lags[b]) + "lambda",
                                                 P(j, j), Estimate{e.value.real(), e.se_re}));
                row.insert(row.end(), {e.value.real(), e.se_re, P(j, j)});
            }
            prof += csv_row(row);
        }
        atomic_write(join(out, "speckle_cov_profile.csv"), prof);

        // image covariance and SNR of the weighted imaging functional
        const auto targets = pairs;
        std::vector<ComplexVecField> clean;
        for (const auto& p : probes) clean.push_back(filtered_data(med, inc, p, grid));
        const auto ens = measurement_noise_ensemble(med, trial, probes, clean, grid, targets, sigma, trials,
                                                    derive_seed(c.mc.seed, 0, 0, 7), threads);
        std::string iprof = "lag,empirical,stderr,predicted\n";
        for (std::size_t b = 0; b < pts.size(); ++b) {
            const auto e = empirical_covariance(ens, 0, b);
            const double pr =
                density ? predicted_image_cov(med, trial, mode, n, sigma, pts[0], pts[b])
                        : predicted_image_cov_elastic(med, trial, mode, n, sigma, pts[0], pts[b], CovConstant::Derived);
            rep["statistics"].push_back(stat("image_cov_lag" + short_real(lags[b]) + "lambda", pr, e));
            if (!density) {
                const double disp =
                    predicted_image_cov_elastic(med, trial, mode, n, sigma, pts[0], pts[b], CovConstant::Displayed);
                auto a = stat("image_cov_lag" + short_real(lags[b]) + "lambda_displayed_constant", disp, e);
                a["ratio_empirical_over_predicted"] = e.value / disp;
                rep["alternatives"].push_back(a);
            }
            iprof += csv_row({lags[b] * lam, e.value, e.se, pr});
        }
        atomic_write(join(out, "image_cov_profile.csv"), iprof);

        const auto clean_img = iwf(med, trial, probes, clean, grid, make_point_set({inc.za}), threads);
        const double emp = empirical_snr(ens, clean_img, 0);
        const double pred = density ? predicted_snr(med, inc, mode, n, sigma)
                                    : assembled_snr(med, inc, trial, mode, n, sigma, CovConstant::Derived);
        rep["statistics"].push_back(stat("snr_at_za", pred, Estimate{emp, emp / std::sqrt(2.0 * (trials - 1))}));
        if (!density) {
            const double disp = predicted_snr(med, inc, mode, n, sigma);
            auto a = stat("snr_at_za_displayed_constant", disp, Estimate{emp, emp / std::sqrt(2.0 * (trials - 1))});
            rep["alternatives"].push_back(a);
        }
    }

    if (medium) {
        const GaussianFieldSpec spec = make_field_spec(c);
        const GaussianFieldSampler sampler(spec);
        std::vector<double> lags;
        for (int i = 0; i <= 20; ++i) lags.push_back(0.1 * i);
        std::vector<Point> pts;
        for (double l : lags) pts.push_back(shifted(inc.za, 0, l * lam));
        const MediumSpeckleImager imager(sampler.geometry(), med, trial, probes, make_point_set(pts), threads);
        std::vector<std::vector<double>> v(pts.size(), std::vector<double>(trials));
        for (int t = 0; t < trials; ++t) {
            const auto img = imager.image(sampler.sample(derive_seed(c.mc.seed, t, 0, 5)));
            for (std::size_t i = 0; i < pts.size(); ++i) v[i][t] = img[i];
        }
        std::string prof = "lag,empirical,stderr,predicted\n";
        std::vector<double> emp_corr, pred_corr, lag_len;
        for (std::size_t b = 0; b < pts.size(); ++b) {
            const auto e = sample_covariance(v[0], v[b]);
            const double pr = medium_noise_image_cov(spec, med, mode, trial, pts[0], pts[b]);
            if (b == 0 || b == 3 || b == 5)
                rep["statistics"].push_back(stat("medium_image_cov_lag" + short_real(lags[b]) + "lambda", pr, e));
            prof += csv_row({lags[b] * lam, e.value, e.se, pr});
            emp_corr.push_back(e.value);
            pred_corr.push_back(pr);
            lag_len.push_back(lags[b] * lam);
        }
        atomic_write(join(out, "medium_cov_profile.csv"), prof);
        // the profile may stay above half on the sampled lags; then only a
        // lower bound is known
        json hw;
        for (const auto& [name, corr] : {std::pair{"empirical", &emp_corr}, std::pair{"predicted", &pred_corr}}) {
            try {
                hw[name] = {{"value", half_width(lag_len, *corr) / lam}, {"lower_bound_only", false}};
            } catch (const std::domain_error&) {
                hw[name] = {{"value", lags.back()}, {"lower_bound_only", true}};
            }
        }
        rep["medium_half_width_over_wavelength"] = hw;
        rep["medium_clipped_eigenvalue_fraction"] = sampler.clipped_fraction();
    }

    bool pass = true;
    for (const auto& s : rep["statistics"]) pass = pass && s["pass"].get<bool>();
    rep["pass"] = pass;
    write_json(join(out, "mc_noise.json"), rep);
    return rep;
}

SuiteReport cmd_validate(const std::string& suite, const ExperimentConfig& c, int threads, bool write) {
    SuiteReport r = run_suite(suite, c, c.mc.trials, threads);
    if (write) write_json(join(c.output.dir, "validate_" + suite + ".json"), r.to_json());
    return r;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Elastic topological-derivative imaging experiments"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    int threads = 1;
    std::string data_dir;
    std::string suite;
    std::string out_arg;
    std::uint64_t seed_arg = 0;
    int trials_arg = 0;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", config_path, "JSON configuration file (defaults when omitted)");
        s->add_option("--out", out_arg, "output directory (overrides output.dir)");
        s->add_option("--seed", seed_arg, "root seed (overrides mc.seed)");
        s->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        s->add_option("--trials", trials_arg, "Monte Carlo trials (overrides mc.trials)")->check(CLI::Range(2, 100000000));
    };
    auto* sim = app.add_subcommand("simulate", "synthesize boundary data for every probe");
    common(sim);
    auto* img = app.add_subcommand("image", "image a simulate output directory");
    common(img);
    img->add_option("--data", data_dir, "simulate output directory (defaults to the output directory)");
    auto* mc = app.add_subcommand("mc-noise", "Monte Carlo noise statistics against closed forms");
    common(mc);
    auto* val = app.add_subcommand("validate", "run an invariant suite");
    common(val);
    val->add_option("suite", suite, "hk | kernels | emt | noise")
        ->required()
        ->check(CLI::IsMember({"hk", "kernels", "emt", "noise"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    auto* cmd = app.get_subcommands().front();
    if (cmd->count("--out")) ov.out = out_arg;
    if (cmd->count("--seed")) ov.seed = seed_arg;
    if (cmd->count("--trials")) ov.trials = trials_arg;

    try {
        ExperimentConfig c = config_path.empty() ? parse_config(json::object()) : load_config(config_path);
        c = apply_overrides(c, ov);
        for (const auto& w : config_warnings(c)) std::cerr << "warning: " << w << "\n";
        if (cmd == sim) {
            const auto m = cmd_simulate(c, threads);
            std::cout << "wrote " << m["probes"].size() << " probe files and manifest.json to " << c.output.dir << "\n";
            return 0;
        }
        if (cmd == img) {
            const auto s = cmd_image(c, data_dir.empty() ? c.output.dir : data_dir, threads);
            std::cout << s.dump(2) << "\n";
            return 0;
        }
        if (cmd == mc) {
            const auto r = cmd_mc_noise(c, threads);
            std::cout << r.dump(2) << "\n";
            return r["pass"].get<bool>() ? 0 : 1;
        }
        const auto r = cmd_validate(suite, c, threads, cmd->count("--out") > 0);
        std::cout << r.to_json().dump(2) << "\n";
        return r.pass() ? 0 : 1;
    } catch (const ManifestMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& d : e.diff) std::cerr << "  " << d << "\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IOError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace etd::app
