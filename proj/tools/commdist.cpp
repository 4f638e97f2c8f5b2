// commdist: command-line front end for the commuting-distance library.
// Exit status: 0 success, 2 input/schema error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "commdist/classify.hpp"
#include "commdist/error.hpp"
#include "commdist/experiments.hpp"
#include "commdist/features.hpp"
#include "commdist/io.hpp"
#include "commdist/kernels.hpp"
#include "commdist/spectral.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace commdist;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-") {
        std::cout << content;
        return;
    }
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::SchemaError, "cannot write '" + out + "'");
    f << content;
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Bound parse_bound(const std::string& s) { return s == "ub" ? Bound::upper : Bound::lower; }

json eigen_json(const char* name, const EigenDecomp& e, const SymMat3& a, double tol_gap) {
    const Vec3 gaps = relative_gaps(e.lambda);
    return {{"solver", name},
            {"lambda", to_json(e.lambda)},
            {"q", to_json(e.q)},
            {"residual", frobenius_norm(e.reconstruct() - a)},
            {"relative_gaps", to_json(gaps)},
            {"degenerate", {gaps[0] < tol_gap, gaps[1] < tol_gap, gaps[2] < tol_gap}}};
}

struct Globals {
    double tol_gap = 1e-8;
    std::string bound = "lb";
    std::string format = "json";
};

int run(int argc, char** argv) {
    CLI::App app{"Commuting distances between symmetric 3x3 matrices and MPT spectral signatures"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--tol-gap", g.tol_gap, "Relative eigenvalue gap treated as repeated")->capture_default_str();

    // eigen
    auto* eigen = app.add_subcommand("eigen", "Eigen-decompose one matrix with both solvers");
    std::string eigen_file, eigen_out;
    eigen->add_option("matrix", eigen_file, "Matrix file (.json or 6-value .csv)")->required();
    eigen->add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    eigen->add_option("-o,--out", eigen_out, "Output file (default stdout)");
    eigen->callback([&] {
        const SymMat3 a = load_matrix(eigen_file);
        const EigenDecomp c = eigh3_cardano(a);
        const EigenDecomp j = eigh3_jacobi(a);
        if (g.format == "csv") {
            std::ostringstream s;
            s << "solver,lambda1,lambda2,lambda3,residual\n";
            for (const auto& [name, e] : {std::pair{"cardano", c}, std::pair{"jacobi", j}})
                s << name << ',' << fmt17(e.lambda[0]) << ',' << fmt17(e.lambda[1]) << ',' << fmt17(e.lambda[2]) << ','
                  << fmt17(frobenius_norm(e.reconstruct() - a)) << '\n';
            emit(eigen_out, s.str());
        } else {
            const json out = {{"cardano", eigen_json("cardano", c, a, g.tol_gap)},
                              {"jacobi", eigen_json("jacobi", j, a, g.tol_gap)}};
            emit(eigen_out, out.dump(2) + "\n");
        }
    });

    // distance
    auto* distance = app.add_subcommand("distance", "Full distance report for a pair of matrices (JSON)");
    std::string dist_a, dist_b, dist_out;
    distance->add_option("a", dist_a, "First matrix file")->required();
    distance->add_option("b", dist_b, "Second matrix file")->required();
    distance->add_option("-o,--out", dist_out, "Output file (default stdout)");
    distance->callback([&] {
        ReportOptions opts;
        opts.degeneracy_tol = g.tol_gap;
        emit(dist_out, to_json(distance_report(load_matrix(dist_a), load_matrix(dist_b), opts)).dump(2) + "\n");
    });

    // fig1
    auto* fig1 = app.add_subcommand("fig1", "Rotated-copy sweep over the applied angle (CSV)");
    double th_min = 0.0, th_max = 0.1;
    std::size_t fig1_steps = 100;
    std::string fig1_out;
    fig1->add_option("--theta-min", th_min)->capture_default_str();
    fig1->add_option("--theta-max", th_max)->capture_default_str();
    fig1->add_option("--steps", fig1_steps)->capture_default_str();
    fig1->add_option("-o,--out", fig1_out, "Output CSV (default stdout)");
    fig1->callback([&] {
        ReportOptions opts;
        opts.degeneracy_tol = g.tol_gap;
        emit(fig1_out, fig1_csv(fig1_sweep(th_min, th_max, fig1_steps, opts)));
    });

    // fig2
    auto* fig2 = app.add_subcommand("fig2", "Near-degenerate sweep over epsilon (CSV)");
    double eps_min = 1e-3, eps_max = 1e-1;
    std::size_t fig2_steps = 50;
    std::string fig2_out;
    fig2->add_option("--eps-min", eps_min)->capture_default_str();
    fig2->add_option("--eps-max", eps_max)->capture_default_str();
    fig2->add_option("--steps", fig2_steps)->capture_default_str();
    fig2->add_option("-o,--out", fig2_out, "Output CSV (default stdout)");
    fig2->callback([&] {
        ReportOptions opts;
        opts.degeneracy_tol = g.tol_gap;
        emit(fig2_out, fig2_csv(fig2_sweep(eps_min, eps_max, fig2_steps, opts)));
    });

    // signature
    auto* signature = app.add_subcommand("signature", "Commutator and distance curves of one spectral signature (CSV)");
    std::string sig_file, sig_pair = "Rtilde_I", sig_out, scaling_field;
    double omega_lo = 0, omega_hi = std::numeric_limits<double>::infinity();
    signature->add_option("signature", sig_file, "Signature file (.csv or .json)")->required();
    signature->add_option("--pair", sig_pair, "Tensor pair")
        ->check(CLI::IsMember({"R_I", "N0_I", "Rtilde_I"}))
        ->capture_default_str();
    signature->add_option("--bound", g.bound, "Angle estimate bound")->check(CLI::IsMember({"lb", "ub"}))->capture_default_str();
    signature->add_option("-o,--out", sig_out, "Output CSV (default stdout)");
    signature->add_option("--scaling", scaling_field,
                          "Also print the log-log slope of this curve field (JSON on stderr)");
    signature->add_option("--omega-lo", omega_lo, "Lower end of the slope fit range");
    signature->add_option("--omega-hi", omega_hi, "Upper end of the slope fit range");
    signature->callback([&] {
        const SpectralSignature sig = load_signature(sig_file);
        DistanceSignatureOptions opts;
        opts.tol_gap = g.tol_gap;
        opts.bound = parse_bound(g.bound);
        const SignatureCurves curves = distance_signature(sig, parse_tensor_pair(sig_pair), opts);
        emit(sig_out, curves_to_csv(curves));
        if (!scaling_field.empty()) {
            const double slope = scaling_exponent(curves, parse_curve_field(scaling_field), omega_lo, omega_hi);
            std::cerr << json{{"field", scaling_field}, {"slope", slope}}.dump() << "\n";
        }
    });

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic signature library and manifest");
    SynthLibraryOptions so;
    std::string synth_dir, synth_format = "csv";
    synth->add_option("dir", synth_dir, "Output directory")->required();
    synth->add_option("--classes", so.classes)->capture_default_str();
    synth->add_option("--per-class", so.per_class)->capture_default_str();
    synth->add_option("--frequencies", so.frequencies, "Signature grid size")->capture_default_str();
    synth->add_option("--selected", so.selected, "Frequencies used for features")->capture_default_str();
    synth->add_option("--jitter", so.jitter, "Relative amplitude jitter")->capture_default_str();
    synth->add_option("--seed", so.seed)->capture_default_str();
    synth->add_option("--format", synth_format, "Signature file format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    synth->callback([&] {
        so.format = synth_format == "json" ? SignatureFormat::json : SignatureFormat::csv;
        const Manifest m = write_synthetic_library(synth_dir, so);
        std::cout << json{{"manifest", (fs::path(synth_dir) / "manifest.json").string()},
                          {"signatures", m.signatures.size()}}.dump() << "\n";
    });

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "Features, SVD reduction, split, train and evaluate");
    std::string manifest_file, out_dir = ".";
    double truncation = 1e-9, l2 = 1.0;
    std::optional<std::uint64_t> seed;
    bool zscore = false;
    std::size_t laplace_samples = 0;
    int max_iter = 20000;
    pipeline->add_option("manifest", manifest_file, "Dataset manifest JSON")->required();
    pipeline->add_option("--truncation", truncation, "Singular value ratio cut-off")->capture_default_str();
    pipeline->add_option("--seed", seed, "Split / sampling seed (default: manifest seed)");
    pipeline->add_option("--l2", l2, "Gaussian prior precision")->capture_default_str();
    pipeline->add_option("--max-iter", max_iter)->capture_default_str();
    pipeline->add_flag("--zscore", zscore, "Standardise features before the SVD (fitted on the training split)");
    pipeline->add_option("--laplace-samples", laplace_samples,
                         "Write per-test-sample posterior class-probability draws")->capture_default_str();
    pipeline->add_option("--out-dir", out_dir, "Directory for metrics.json, model.json and reduced_*.csv")
        ->capture_default_str();
    pipeline->callback([&] {
        const Manifest m = load_manifest(manifest_file);
        const std::uint64_t s = seed.value_or(m.seed);
        FeatureOptions fo;
        fo.tol_gap = g.tol_gap;
        Dataset full = build_dataset(m, fo);
        // Split before any fitting so the test set never informs the basis.
        auto [train_raw, test_raw] = split(full, s);
        if (zscore) {
            const Standardizer st = Standardizer::fit(train_raw);
            st.apply(train_raw);
            st.apply(test_raw);
        }
        const ReducedBasis basis = fit_reducer(train_raw, truncation);
        const Dataset train_set = reduce(basis, train_raw);
        const Dataset test_set = reduce(basis, test_raw);
        TrainOptions to;
        to.l2 = l2;
        to.max_iter = max_iter;
        TrainReport rep;
        const LogRegModel model = train(train_set, to, &rep);
        const Evaluation ev = evaluate(model, test_set);

        fs::create_directories(out_dir);
        const fs::path dir(out_dir);
        emit((dir / "reduced_train.csv").string(), dataset_to_csv(train_set));
        emit((dir / "reduced_test.csv").string(), dataset_to_csv(test_set));
        emit((dir / "model.json").string(), model_to_json(model));
        std::vector<double> sigma(basis.sigma.data(), basis.sigma.data() + basis.sigma.size());
        const json metrics = {{"samples", full.size()},
                              {"features", full.dim()},
                              {"G", basis.rank()},
                              {"singular_values", sigma},
                              {"truncation", truncation},
                              {"seed", s},
                              {"zscore", zscore},
                              {"train_size", train_set.size()},
                              {"test_size", test_set.size()},
                              {"accuracy", ev.accuracy},
                              {"confusion", ev.confusion},
                              {"class_names", full.class_names},
                              {"iterations", rep.iterations},
                              {"converged", rep.converged},
                              {"objective", rep.objective},
                              {"grad_norm", rep.grad_norm}};
        emit((dir / "metrics.json").string(), metrics.dump(2) + "\n");
        if (laplace_samples > 0) {
            std::ostringstream d;
            d << "sample,true_class,draw";
            for (const auto& c : model.class_names) d << ",p_" << c;
            d << '\n';
            for (std::size_t n = 0; n < test_set.size(); ++n) {
                const auto draws = predict_distribution(model, test_set.x[n], laplace_samples, s + n);
                for (std::size_t k = 0; k < laplace_samples; ++k) {
                    d << n << ',' << test_set.class_names[test_set.labels[n]] << ',' << k;
                    for (const auto& cls : draws) d << ',' << fmt17(cls[k]);
                    d << '\n';
                }
            }
            emit((dir / "laplace_draws.csv").string(), d.str());
        }
        std::cout << metrics.dump() << "\n";
    });

    auto* info = app.add_subcommand("info", "Print build and runtime details");
    info->callback([] {
        std::cout << json{{"kernel_isa", kernels::to_string(kernels::best_isa())},
                          {"avx2_available", kernels::avx2_available()}}.dump() << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_numerical(e.kind()) ? kExitNumerical : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
