// Command-line front end: instance files in, human-readable blocks or a JSON
// report envelope out. Exit codes: 0 success, 2 validation error, 3 numerical
// failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "concord/instance.hpp"
#include "concord/measures.hpp"
#include "concord/oracle.hpp"
#include "concord/partition.hpp"
#include "concord/renegar.hpp"

using namespace concord;
using ordered_json = nlohmann::ordered_json;

namespace {

struct Options {
    bool json = false;
    uint64_t seed = 0;
    int budget = 2000;
    double tol = tol::strict_pos;
    int threads = 1;
};

struct Report {
    std::string command;
    std::string inputs_digest;
    uint64_t seed = 0;
    ordered_json results = ordered_json::object();

    void add(const std::string& name, double value, const std::string& path,
             std::optional<double> residual = std::nullopt,
             const ordered_json& certificate = ordered_json()) {
        ordered_json r;
        r["value"] = value;
        r["path"] = path;
        if (residual) r["residual"] = *residual;
        if (!certificate.is_null()) r["certificate"] = certificate;
        results[name] = r;
    }

    void add_cert(const std::string& name, const MeasureCertificate& c) {
        ordered_json cj;
        auto vecj = [](const Vec& v) {
            ordered_json a = ordered_json::array();
            for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
            return a;
        };
        if (c.u_bar) cj["u_bar"] = vecj(*c.u_bar);
        if (c.y_bar) cj["y_bar"] = vecj(*c.y_bar);
        if (c.x_bar) cj["x_bar"] = vecj(*c.x_bar);
        if (c.v_bar) cj["v_bar"] = vecj(*c.v_bar);
        if (c.approximate) {
            cj["bracket_lo"] = c.bracket_lo;
            cj["bracket_hi"] = c.bracket_hi;
        }
        if (c.infeasible_side) cj["infeasible_side"] = true;
        std::optional<double> resid;
        if (std::isfinite(c.alignment_residual)) resid = c.alignment_residual;
        add(name, c.value, to_string(c.path), resid, cj);
    }

    void print(bool as_json) const {
        if (as_json) {
            ordered_json j;
            j["command"] = command;
            j["inputs_digest"] = inputs_digest;
            j["results"] = results;
            j["seed"] = seed;
            std::cout << j.dump(2) << "\n";
            return;
        }
        std::cout << "command: " << command << "\n";
        std::cout << "inputs_digest: " << inputs_digest << "\n";
        std::cout << "seed: " << seed << "\n";
        for (auto it = results.begin(); it != results.end(); ++it) {
            std::cout << it.key() << ":";
            const ordered_json& r = it.value();
            if (r.contains("value")) std::cout << " value=" << r["value"].dump();
            if (r.contains("path")) std::cout << " path=" << r["path"].get<std::string>();
            if (r.contains("residual")) std::cout << " residual=" << r["residual"].dump();
            std::cout << "\n";
        }
    }
};

std::string file_digest(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return digest_hex(ss.str());
}

int run_measure(const std::string& path, const Options& opt) {
    InstanceFile inst = load_instance(path);
    Report rep{"measure", file_digest(path), opt.seed};
    rep.add_cert("nu", nu(inst.subspace, inst.cone, inst.norms));
    rep.add_cert("nu_bar", nu_bar(inst.subspace, inst.cone, inst.norms));
    rep.add_cert("sigma", sigma(inst.subspace, inst.cone, inst.norms));
    if (inst.cone->kind() == Cone::Kind::Orthant &&
        (is_polyhedral(inst.norms.primal) || inst.norms.primal.is_l2()))
        rep.add_cert("sym", sym(inst.subspace, inst.cone, inst.norms.primal));
    try {
        rep.add("theta", theta(inst.cone), "ClosedForm");
    } catch (const UnsupportedCone&) {
    }
    rep.print(opt.json);
    return 0;
}

int run_dist(const std::string& path, const std::string& other, const Options& opt) {
    InstanceFile a = load_instance(path);
    InstanceFile b = load_instance(other);
    if (a.n != b.n) throw ParseError("dist: instances have different ambient dimensions");
    Report rep{"dist", file_digest(path) + "+" + file_digest(other), opt.seed};
    rep.add_cert("dist_12", dist(a.subspace, b.subspace, a.norms));
    rep.add_cert("dist_21", dist(b.subspace, a.subspace, a.norms));
    rep.add_cert("odist_12", odist(a.subspace, b.subspace, a.norms));
    rep.add_cert("odist_21", odist(b.subspace, a.subspace, a.norms));
    rep.print(opt.json);
    return 0;
}

int run_partition(const std::string& path, const Options& opt) {
    InstanceFile inst = load_instance(path);
    if (inst.cone->kind() != Cone::Kind::Orthant)
        throw ParseError("partition: the Goldman-Tucker partition needs the orthant cone");
    Report rep{"partition", file_digest(path), opt.seed};
    GtPartition gt = goldman_tucker(inst.subspace);
    ordered_json bj = ordered_json::array(), nj = ordered_json::array();
    for (Index i : gt.b_set) bj.push_back(i);
    for (Index i : gt.n_set) nj.push_back(i);
    ordered_json cert;
    cert["B"] = bj;
    cert["N"] = nj;
    ordered_json xc = ordered_json::array(), yc = ordered_json::array();
    for (Index i = 0; i < gt.x_cert.size(); ++i) xc.push_back(gt.x_cert[i]);
    for (Index i = 0; i < gt.y_cert.size(); ++i) yc.push_back(gt.y_cert[i]);
    cert["x_cert"] = xc;
    cert["y_cert"] = yc;
    rep.add("partition", static_cast<double>(gt.b_set.size()), "LpExact", std::nullopt, cert);
    PartitionMeasures pm = partition_measures(inst.subspace, inst.norms);
    if (pm.nu_b) rep.add_cert("nu_B", *pm.nu_b);
    if (pm.sigma_b) rep.add_cert("sigma_B", *pm.sigma_b);
    if (pm.nu_n) rep.add_cert("nu_N", *pm.nu_n);
    if (pm.sigma_n) rep.add_cert("sigma_N", *pm.sigma_n);
    if (inst.map) {
        BlockDecomposition dec = block_decompose(*inst.map, gt);
        rep.add("block_reconstruction", dec.reconstruction_residual, "LpExact");
    }
    rep.print(opt.json);
    return 0;
}

int run_renegar(const std::string& path, const Options& opt) {
    InstanceFile inst = load_instance(path);
    if (!inst.map) throw ParseError("renegar: instance has no 'map' block");
    Report rep{"renegar", file_digest(path), opt.seed};
    oracle::Budget budget;
    budget.perturbation_directions = std::max(10, opt.budget / 10);
    budget.threads = opt.threads;
    double est = oracle::rdist_estimate(*inst.map, inst.cone, budget, opt.seed);
    SandwichReport sr = renegar_sandwich(*inst.map, inst.cone, est);
    rep.add("norm_a", sr.norms.norm_a, sr.norms.exact ? "LpExact" : "Sampled");
    rep.add("norm_a_inv", sr.norms.norm_a_inv, sr.norms.exact ? "LpExact" : "Sampled");
    rep.add("kappa", sr.norms.kappa, sr.norms.exact ? "LpExact" : "Sampled");
    rep.add_cert(sr.feasible_side ? "grassmann_nu" : "grassmann_nu_bar", sr.grassmann_cert);
    rep.add("rdist_lower", sr.lower, "LpExact");
    rep.add("rdist_upper", sr.upper, "LpExact");
    rep.add("rdist_estimate", est, "Sampled");
    rep.print(opt.json);
    return 0;
}

int run_precondition(const std::string& path, const Options& opt) {
    InstanceFile inst = load_instance(path);
    if (!inst.map) throw ParseError("precondition: instance has no 'map' block");
    Report rep{"precondition", file_digest(path), opt.seed};
    PreconditionReport pr = precondition(*inst.map, inst.cone);
    rep.add("nu_before", pr.nu_before, "LpExact");
    rep.add_cert("nu_after", pr.nu_after_cert);
    rep.add("bound", pr.bound, "ClosedForm");
    rep.add("balance_residual", pr.balance_residual, "ClosedForm");
    rep.print(opt.json);
    return 0;
}

int run_certify(const std::string& path, const Options& opt) {
    InstanceFile inst = load_instance(path);
    oracle::Budget budget;
    budget.subspace_samples = opt.budget;
    budget.threads = opt.threads;
    auto report = oracle::verify_suite(inst.subspace, inst.cone, inst.norms, inst.map, opt.seed,
                                       budget);
    Report rep{"certify", file_digest(path), opt.seed};
    for (const auto& c : report.checks) {
        ordered_json cj;
        cj["pass"] = c.pass;
        if (!c.detail.empty()) cj["detail"] = c.detail;
        rep.add(c.name, c.residual, c.pass ? "check-pass" : "check-fail", std::nullopt, cj);
    }
    rep.print(opt.json);
    if (!opt.json)
        for (const auto& c : report.checks)
            std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " residual=" << c.residual
                      << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
    return 0;
}

int run_oracle(const std::string& path, const Options& opt) {
    InstanceFile inst = load_instance(path);
    Report rep{"oracle", file_digest(path), opt.seed};
    oracle::Budget budget;
    budget.subspace_samples = opt.budget;
    budget.threads = opt.threads;
    double margin = interior_margin(inst.subspace, inst.cone);
    rep.add("interior_margin", margin, "LpExact");
    if (margin > opt.tol) {
        auto bracket =
            oracle::dist_to_illposed_estimate(inst.subspace, inst.cone, inst.norms, budget, opt.seed);
        rep.add("dist_to_illposed_lo", bracket.lo, "LpExact");
        rep.add("dist_to_illposed_hi", bracket.hi, "Sampled");
    }
    if (inst.map) {
        double est = oracle::rdist_estimate(*inst.map, inst.cone, budget, opt.seed);
        rep.add("rdist_estimate", est, "Sampled");
    }
    rep.print(opt.json);
    return 0;
}

int run_gen(Index n, Index m, const std::string& cone_tag, const Options& opt,
            const std::string& primal, const std::string& tri, bool with_map,
            const std::string& out_path) {
    InstanceFile inst = generate_instance(n, m, cone_tag, opt.seed, primal, tri, with_map);
    std::string text = serialize_instance(inst);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        out << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Condition measures of the conic feasibility problem find x in L cap K \\ {0}"};
    app.require_subcommand(1);

    Options opt;
    app.add_flag("--json", opt.json, "emit a JSON report envelope");
    app.add_option("--seed", opt.seed, "RNG seed for sampled paths")->capture_default_str();
    app.add_option("--budget", opt.budget, "sample budget for oracle estimates")
        ->capture_default_str();
    app.add_option("--tol", opt.tol, "strict-positivity tolerance")->capture_default_str();
    app.add_option("--threads", opt.threads, "worker threads for oracle fan-out")
        ->capture_default_str();

    std::string path, other, out_path;
    Index gen_n = 4, gen_m = 2;
    std::string cone_tag = "orthant", primal = "l2", tri = "l2";
    bool with_map = false;

    auto* c_measure = app.add_subcommand("measure", "condition measures of one instance");
    c_measure->add_option("instance", path)->required();
    auto* c_dist = app.add_subcommand("dist", "distances between two instance subspaces");
    c_dist->add_option("instance", path)->required();
    c_dist->add_option("--other", other, "second instance file")->required();
    auto* c_part = app.add_subcommand("partition", "Goldman-Tucker partition and block measures");
    c_part->add_option("instance", path)->required();
    auto* c_ren = app.add_subcommand("renegar", "data condition bounds for the instance map");
    c_ren->add_option("instance", path)->required();
    auto* c_pre = app.add_subcommand("precondition", "cone-automorphism preconditioning");
    c_pre->add_option("instance", path)->required();
    auto* c_cert = app.add_subcommand("certify", "run every applicable theorem check");
    c_cert->add_option("instance", path)->required();
    auto* c_oracle = app.add_subcommand("oracle", "brute-force estimates and brackets");
    c_oracle->add_option("instance", path)->required();
    auto* c_gen = app.add_subcommand("gen", "generate a random instance file");
    c_gen->add_option("--n", gen_n, "ambient dimension")->capture_default_str();
    c_gen->add_option("--m", gen_m, "subspace dimension")->capture_default_str();
    c_gen->add_option("--cone", cone_tag, "orthant|soc|psd|polyhedral2d")->capture_default_str();
    c_gen->add_option("--primal", primal, "primal norm tag")->capture_default_str();
    c_gen->add_option("--tri", tri, "tri norm tag")->capture_default_str();
    c_gen->add_flag("--with-map", with_map, "attach a random map block");
    c_gen->add_option("-o,--out", out_path, "output path (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_measure->parsed()) return run_measure(path, opt);
        if (c_dist->parsed()) return run_dist(path, other, opt);
        if (c_part->parsed()) return run_partition(path, opt);
        if (c_ren->parsed()) return run_renegar(path, opt);
        if (c_pre->parsed()) return run_precondition(path, opt);
        if (c_cert->parsed()) return run_certify(path, opt);
        if (c_oracle->parsed()) return run_oracle(path, opt);
        if (c_gen->parsed()) return run_gen(gen_n, gen_m, cone_tag, opt, primal, tri, with_map, out_path);
    } catch (const ParseError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionMismatch& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateSubspace& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
