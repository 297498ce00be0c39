// Command-line front end: closed-form mass analysis, monodromy computation,
// invariant search, and the end-to-end verification pipeline.
//
// Exit codes: 0 success; 2 invalid input; 3 numerical failure (continuation
// or conditioning); 4 structural check failure. Reports are deterministic:
// identical inputs, tolerances and seed give byte-identical output.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "fuchs/fuchs.hpp"

namespace {

struct RunConfig {
    double tol = 1e-9;
    double cluster_tol = 1e-8; ///< relative to matrix norm
    double invariant_tol = 1e-8;
    double check_tol = 1e-7;
    std::string format = "text";
    std::uint64_t seed = 20140916;
    std::string out = "-";
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fuchs::InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const RunConfig& cfg, const fuchs::ordered_json& report) {
    const std::string body =
        cfg.format == "json" ? report.dump(2) + "\n" : fuchs::render_text(report);
    if (cfg.out == "-") {
        std::cout << body;
    } else {
        std::ofstream out(cfg.out, std::ios::binary);
        if (!out) throw fuchs::InputError("cannot write " + cfg.out);
        out << body;
    }
}

fuchs::Masses masses_from_flags(const std::vector<double>& masses, double sigma,
                                bool sigma_set) {
    if (sigma_set) return fuchs::masses_for_sigma(sigma);
    if (masses.size() != 3)
        throw fuchs::InputError("expected --masses m1,m2,m3 or --sigma s");
    fuchs::Masses m{masses[0], masses[1], masses[2]};
    fuchs::validate_masses(m);
    return m;
}

int cmd_masses(const RunConfig& cfg, const std::vector<double>& masses, double sigma,
               bool sigma_set) {
    const auto m = masses_from_flags(masses, sigma, sigma_set);
    const auto inv = fuchs::mass_invariants(m);
    const auto cls = fuchs::classify_sigma(inv.sigma);
    emit(cfg, fuchs::masses_report_json(m, inv, cls));
    return 0;
}

int cmd_monodromy(const RunConfig& cfg, const std::string& system_path,
                  const std::string& loop_path) {
    const auto sys = fuchs::parse_system(read_file(system_path));
    if (!loop_path.empty()) {
        const auto route = fuchs::parse_route(read_file(loop_path), sys);
        const auto result = fuchs::transport(sys, route, cfg.tol);
        emit(cfg, fuchs::transport_report_json(result, cfg.tol));
        return 0;
    }
    const auto group = fuchs::monodromy_generators(sys, cfg.tol);
    const auto report = fuchs::monodromy_report_json(sys, group, cfg.cluster_tol);
    emit(cfg, report);
    if (!report["ordering_consistent"].get<bool>()) {
        std::cerr << "error: product relation T0...Tk-1 * Tinf = Id violated (residual "
                  << fuchs::format_double(report["product_relation_residual"].get<double>())
                  << "); singularity file order is not a clockwise sweep order around the "
                     "basepoint\n";
        return 4;
    }
    return 0;
}

int cmd_invariants(const RunConfig& cfg, const std::string& generators_path) {
    const auto gens = fuchs::parse_generators(read_file(generators_path));
    const auto lin = fuchs::linear_invariants(gens, cfg.invariant_tol);
    const auto quad = fuchs::quadratic_invariants(gens, cfg.invariant_tol);
    auto report = fuchs::invariants_report_json(lin, quad);

    // Permutation-pair analysis applies to a two-generator presentation
    // (optionally with a leading identity) and needs the spectral shape of
    // T_inf = (T1 T2)^{-1}; report the reason whenever it does not run.
    const fuchs::CMatrix* t1 = nullptr;
    const fuchs::CMatrix* t2 = nullptr;
    if (gens.size() == 2) {
        t1 = &gens[0];
        t2 = &gens[1];
    } else if (gens.size() == 3 &&
               (gens[0] - fuchs::identity(gens[0].rows())).norm() <= cfg.check_tol) {
        t1 = &gens[1];
        t2 = &gens[2];
    }
    if (t1 && t1->rows() == 4) {
        try {
            const fuchs::CMatrix t_inf = fuchs::inverse_checked(*t1 * *t2, "T1*T2");
            report["permutation_pair"] = fuchs::permutation_pair_json(
                fuchs::permutation_pair_structure(*t1, *t2, t_inf, cfg.invariant_tol));
        } catch (const fuchs::NumericError& e) {
            report["permutation_pair"] = {{"applicable", false}, {"reason", e.what()}};
        }
    } else {
        report["permutation_pair"] = {
            {"applicable", false},
            {"reason", "needs two 4x4 generators (or identity plus two)"}};
    }
    emit(cfg, report);
    return 0;
}

int cmd_verify(const RunConfig& cfg, const std::vector<double>& masses, double sigma,
               bool sigma_set, const std::string& system_path) {
    const auto m = masses_from_flags(masses, sigma, sigma_set);
    const auto sys = fuchs::parse_system(read_file(system_path));
    fuchs::PipelineOptions opt;
    opt.transport_tol = cfg.tol;
    opt.check_tol = cfg.check_tol;
    opt.invariant_tol = cfg.invariant_tol;
    const auto report = fuchs::verify_pipeline(m, sys, opt);
    emit(cfg, fuchs::pipeline_report_json(report));
    return report.structural_pass ? 0 : 4;
}

int cmd_selftest(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    auto unif = [&] { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); };
    auto random_residue = [&](int n, double scale) {
        fuchs::CMatrix a(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) a(r, c) = fuchs::cx(unif(), unif());
        return fuchs::CMatrix(a * (scale / a.norm()));
    };

    fuchs::ordered_json checks = fuchs::ordered_json::array();
    bool all_ok = true;
    auto record = [&](const std::string& name, double resid, double tol) {
        const bool ok = resid <= tol;
        all_ok = all_ok && ok;
        checks.push_back({{"name", name},
                          {"status", ok ? "pass" : "fail"},
                          {"residual", resid},
                          {"tolerance", tol}});
    };

    // local monodromy of a single singularity is exp(2 pi i A)
    for (int rep = 0; rep < 3; ++rep) {
        const auto a = random_residue(4, 0.6);
        fuchs::FuchsianSystem sys(4, {{fuchs::cx(0, 0), a}}, fuchs::cx(1.2, 0.3));
        const auto loop = fuchs::standard_loop(sys, 0, fuchs::Orientation::Counterclockwise);
        const auto t = fuchs::transport(sys, fuchs::materialize_loop(sys, loop), cfg.tol).matrix;
        // reference by scaling-and-squaring of the series on a shrunk matrix
        fuchs::CMatrix x = 2.0 * fuchs::pi * fuchs::imag_unit * a;
        int squarings = 0;
        while (x.norm() > 0.25) { x *= 0.5; ++squarings; }
        fuchs::CMatrix e = fuchs::identity(4), term = fuchs::identity(4);
        for (int k = 1; k <= 24; ++k) {
            term = term * x / static_cast<double>(k);
            e += term;
        }
        for (int s = 0; s < squarings; ++s) e = e * e;
        record("monodromy_exponential_" + std::to_string(rep), fuchs::max_abs(t - e), 1e-8);
    }

    // product relation for a clockwise-ordered three-singularity system
    {
        std::vector<fuchs::Singularity> sing;
        const double angles[3] = {2.0, 0.5, -1.4}; // decreasing: clockwise sweep order
        for (double th : angles)
            sing.push_back({std::polar(1.0 + 0.3 * unif(), th), random_residue(3, 0.4)});
        fuchs::FuchsianSystem sys(3, sing, fuchs::cx(0, 0));
        const auto g = fuchs::monodromy_generators(sys, cfg.tol);
        record("product_relation", fuchs::product_relation_residual(g), 1e-7);
    }

    // reflection symmetry for a conjugation-invariant system
    {
        fuchs::CMatrix a = random_residue(4, 0.4);
        a = (a + a.conjugate()) / 2.0; // real
        const fuchs::CMatrix b = random_residue(4, 0.4);
        const fuchs::cx z1{0.4, 0.8};
        std::vector<fuchs::Singularity> sing{{z1, b}, {fuchs::cx(1.0, 0.0), a}, {std::conj(z1), b.conjugate()}};
        fuchs::FuchsianSystem sys(4, sing, fuchs::cx(0, 0));
        const auto g = fuchs::monodromy_generators(sys, cfg.tol);
        record("reflection_symmetry",
               fuchs::reflection_symmetry_residual(g.generators[0], g.generators[2]), 1e-7);
    }

    // closed-form spot checks
    {
        const auto inv = fuchs::mass_invariants({0.1, 0.1, 1.0});
        record("sigma_7_48", std::abs(inv.sigma - 7.0 / 48.0), 1e-14);
        record("lambda2_5_2", std::abs(inv.lambda2 - fuchs::cx(2.5, 0.0)), 1e-12);
    }

    fuchs::ordered_json report;
    report["seed"] = cfg.seed;
    report["tolerance"] = cfg.tol;
    report["checks"] = checks;
    report["all_passed"] = all_ok;
    emit(cfg, report);
    return all_ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical monodromy of Fuchsian systems"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    RunConfig cfg;
    app.add_option("--tol", cfg.tol, "transport tolerance")->check(CLI::PositiveNumber);
    app.add_option("--cluster-tol", cfg.cluster_tol,
                   "eigenvalue cluster tolerance, relative to the matrix norm")
        ->check(CLI::PositiveNumber);
    app.add_option("--invariant-tol", cfg.invariant_tol, "invariant null-space threshold")
        ->check(CLI::PositiveNumber);
    app.add_option("--check-tol", cfg.check_tol, "structural check tolerance")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", cfg.format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--seed", cfg.seed, "seed for randomized self-tests");
    app.add_option("--out", cfg.out, "output path, - for stdout");

    std::vector<double> masses_flag;
    double sigma_flag = 0.0;
    std::string system_path, loop_path, generators_path;

    auto* masses_cmd = app.add_subcommand("masses", "closed-form mass invariants and spectra");
    auto* mm = masses_cmd->add_option("--masses", masses_flag, "mass triple m1,m2,m3")
                   ->delimiter(',')
                   ->expected(3);
    auto* ms = masses_cmd->add_option("--sigma", sigma_flag, "generate masses for this sigma");
    mm->excludes(ms);

    auto* mono_cmd = app.add_subcommand("monodromy", "monodromy generators of a system file");
    mono_cmd->add_option("--system", system_path, "system file")->required();
    mono_cmd->add_option("--loop", loop_path, "loop or path file: transport this route only");

    auto* inv_cmd = app.add_subcommand("invariants", "polynomial invariants of a generator set");
    inv_cmd->add_option("--generators", generators_path, "generators file")->required();

    auto* verify_cmd = app.add_subcommand("verify", "verify supplied residues against the closed forms");
    auto* vm = verify_cmd->add_option("--masses", masses_flag, "mass triple m1,m2,m3")
                   ->delimiter(',')
                   ->expected(3);
    auto* vs = verify_cmd->add_option("--sigma", sigma_flag, "generate masses for this sigma");
    vm->excludes(vs);
    verify_cmd->add_option("--system", system_path, "residue system file")->required();

    app.add_subcommand("selftest", "seeded randomized self-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (masses_cmd->parsed())
            return cmd_masses(cfg, masses_flag, sigma_flag, ms->count() > 0);
        if (mono_cmd->parsed()) return cmd_monodromy(cfg, system_path, loop_path);
        if (inv_cmd->parsed()) return cmd_invariants(cfg, generators_path);
        if (verify_cmd->parsed())
            return cmd_verify(cfg, masses_flag, sigma_flag, vs->count() > 0, system_path);
        return cmd_selftest(cfg);
    } catch (const fuchs::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fuchs::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
