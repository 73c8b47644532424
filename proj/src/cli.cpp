#include "thermoneuron/cli.hpp"

#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "thermoneuron/error.hpp"
#include "thermoneuron/io.hpp"

namespace thermoneuron::cli {

unsigned worker_count() {
    if (const char* env = std::getenv("THERMONEURON_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Evaluates f(0..n-1) on a small pool; results keep index order.
template <class F>
auto parallel_map(std::size_t n, F f) -> std::vector<decltype(f(std::size_t{0}))> {
    std::vector<decltype(f(std::size_t{0}))> results(n);
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = f(i);
        return results;
    }
    std::exception_ptr failure;
    std::mutex lock;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += workers) results[i] = f(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(lock);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
}

std::vector<std::size_t> parse_topology(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::stringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t used = 0;
            const long v = std::stol(tok, &used);
            if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
            sizes.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError("--layers expects positive integers like 2,1, got '" + text + "'");
        }
    }
    if (sizes.empty()) throw ConfigError("--layers is empty");
    return sizes;
}

struct GridAxis {
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
    double at(std::size_t i) const {
        return count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

GridAxis parse_axis(const std::string& text) {
    GridAxis a;
    char c1 = 0, c2 = 0;
    long count = -1;
    std::istringstream in(text);
    if (!(in >> a.lo >> c1 >> a.hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 0 ||
        !in.eof() || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
        throw ConfigError("--grid expects lo:hi:count with finite bounds, got '" + text + "'");
    }
    a.count = static_cast<std::size_t>(count);
    return a;
}

Encoding machine_encoding(const MachineFile& m, double delta, const std::string& band) {
    const NetworkSpec net = m.as_network();
    const NeuronSpec& any = net.layers.front().front().neuron;
    return Encoding(any.beta_hot, any.beta_cold, delta, parse_band(band));
}

void check_arity(const MachineFile& m, std::size_t got) {
    if (got != m.inputs()) {
        std::ostringstream msg;
        msg << "machine has " << m.inputs() << " input(s) but " << got << " were given";
        throw ConfigError(msg.str());
    }
}

std::string bits_text(const std::vector<int>& bits) {
    std::string s;
    for (int b : bits) s += (s.empty() ? "" : " ") + std::to_string(b);
    return s;
}

// ---------------------------------------------------------------------------

struct DesignArgs {
    std::string gate, table, layers, out;
    double alpha = 20.0, eps_z = 0.1;
    std::uint64_t seed = 7;
};

int cmd_design(const DesignArgs& a, std::ostream& out, std::ostream& err) {
    if (a.gate.empty() == a.table.empty()) throw ConfigError("design needs exactly one of --gate or --table");
    DesignConfig cfg;
    cfg.alpha = a.alpha;
    cfg.eps_z = a.eps_z;
    cfg.trainer.seed = a.seed;

    MachineFile file;
    file.provenance.alpha = a.alpha;
    file.provenance.eps_z = a.eps_z;
    file.provenance.seed = a.seed;
    std::ostringstream report;

    TruthTable table;
    WeightVector w;
    if (!a.gate.empty()) {
        const Gate g = parse_gate(a.gate);
        table = gate_table(g);
        w = preset_weights(g);
    } else {
        table = load_truth_table(a.table);
    }

    if (!a.layers.empty()) {
        NetworkTrainConfig ncfg;
        ncfg.seed = a.seed;
        ncfg.design = cfg;
        const TrainedNetwork trained = train_network(table, parse_topology(a.layers), ncfg);
        file.kind = MachineFile::Kind::Network;
        file.network = trained.net;
        file.provenance.weights = trained.weights;
        report << "trained network: final loss " << fmt12(trained.final_loss) << "\n";
        for (std::size_t l = 0; l < trained.net.layers.size(); ++l) {
            for (std::size_t j = 0; j < trained.net.layers[l].size(); ++j) {
                const NeuronSpec& s = trained.net.layers[l][j].neuron;
                report << "layer " << l << " unit " << j << ": eps_z = " << fmt12(s.eps_z)
                       << ", resonance mismatch = " << fmt12(std::abs(std::abs(s.signed_gap()) - s.eps_z))
                       << "\n";
            }
        }
        report << "behavioral check: " << table.rows() << "/" << table.rows() << " rows\n";
    } else {
        if (a.gate.empty()) {
            try {
                w = train_perceptron(table, cfg);
            } catch (const SeparabilityError& e) {
                err << "error: " << e.what() << " (pass --layers, for example --layers 2,1)\n";
                return kUsage;
            }
        }
        file.kind = MachineFile::Kind::Neuron;
        file.neuron = weights_to_neuron(w, cfg);
        file.provenance.weights = w;
        const NeuronSpec& s = file.neuron;
        report << "resonance: eps_z = " << fmt12(s.eps_z) << ", |virtual gap| = "
               << fmt12(std::abs(s.signed_gap())) << ", mismatch = "
               << fmt12(std::abs(std::abs(s.signed_gap()) - s.eps_z)) << "\n";
        report << "perceptron identity residual: "
               << fmt12(perceptron_identity_residual(s, w, cfg.alpha, table)) << "\n";
        for (const auto& warning : s.validate()) report << "warning: " << warning << "\n";
    }

    if (a.out.empty() || a.out == "-") {
        out << dump_machine(file);
        err << report.str();
    } else {
        emit(a.out, dump_machine(file), out);
        out << report.str() << "wrote " << a.out << "\n";
    }
    return kOk;
}

struct SteadyArgs {
    std::string machine, band = "additive";
    std::vector<double> inputs;
    double delta = 0.1;
    bool json = false;
};

int cmd_steady(const SteadyArgs& a, std::ostream& out) {
    const MachineFile m = load_machine(a.machine);
    check_arity(m, a.inputs.size());
    const Encoding enc = machine_encoding(m, a.delta, a.band);
    const NetworkResult res = eval_network(m.as_network(), a.inputs);
    const double bz = res.final_output();
    const std::string y = output_name(decode(bz, enc));
    if (a.json) {
        nlohmann::json j{{"inputs", a.inputs}, {"beta_z_inf", bz}, {"decoded", y}, {"layers", res.outputs}};
        if (m.kind == MachineFile::Kind::Neuron) j["beta_v"] = neuron_virtual_temperature(m.neuron, a.inputs);
        out << j.dump(2) << "\n";
        return kOk;
    }
    if (m.kind == MachineFile::Kind::Neuron) {
        out << "beta_v = " << fmt12(neuron_virtual_temperature(m.neuron, a.inputs)) << "\n";
    } else {
        for (std::size_t l = 0; l + 1 < res.outputs.size(); ++l) {
            out << "layer " << l << ":";
            for (double v : res.outputs[l]) out << ' ' << fmt12(v);
            out << "\n";
        }
    }
    out << "beta_z_inf = " << fmt12(bz) << "\n";
    out << "decoded = " << y << "\n";
    return kOk;
}

struct SimulateArgs {
    std::string machine, mode = "quasi", out;
    std::vector<double> inputs;
    double tau = 1e8;
    double beta_z0 = std::numeric_limits<double>::quiet_NaN();
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const MachineFile m = load_machine(a.machine);
    if (m.kind != MachineFile::Kind::Neuron) throw ConfigError("simulate needs a single-neuron machine");
    check_arity(m, a.inputs.size());
    const NeuronSpec& s = m.neuron;
    const double start = std::isnan(a.beta_z0) ? 0.5 * (s.beta_hot + s.beta_cold) : a.beta_z0;
    Trajectory traj;
    if (a.mode == "quasi") {
        traj = evolve_quasi_static(s, a.inputs, start, a.tau);
    } else if (a.mode == "full") {
        traj = evolve_full(s, a.inputs, start, a.tau);
    } else {
        throw ConfigError("--mode must be quasi or full");
    }
    const double target = steady_output(s, a.inputs).beta_z_inf;
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    csv << "# endpoint beta_z = " << fmt12(traj.back().beta_z) << ", steady value = " << fmt12(target)
        << ", residual = " << fmt12(traj.back().beta_z - target) << "\n";
    emit(a.out, csv.str(), out);
    return kOk;
}

struct SweepArgs {
    std::string machine, out, band = "additive";
    std::vector<std::string> grid;
    double delta = 0.1;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    const MachineFile m = load_machine(a.machine);
    check_arity(m, a.grid.size());
    const Encoding enc = machine_encoding(m, a.delta, a.band);
    const NetworkSpec net = m.as_network();
    const bool neuron = m.kind == MachineFile::Kind::Neuron;
    std::vector<GridAxis> axes;
    std::size_t total = 1;
    for (const auto& g : a.grid) {
        axes.push_back(parse_axis(g));
        total *= axes.back().count;
    }

    std::ostringstream csv;
    csv << "# " << kUnitsNote << "\n";
    for (std::size_t k = 0; k < axes.size(); ++k) csv << "beta_" << k + 1 << ',';
    if (neuron) csv << "beta_v,";
    csv << "beta_z_inf,decoded\n";

    const auto rows = parallel_map(total, [&](std::size_t idx) {
        std::vector<double> beta(axes.size());
        std::size_t rest = idx;
        for (std::size_t k = axes.size(); k-- > 0;) {
            beta[k] = axes[k].at(rest % axes[k].count);
            rest /= axes[k].count;
        }
        std::ostringstream row;
        for (double b : beta) row << fmt12(b) << ',';
        if (neuron) row << fmt12(neuron_virtual_temperature(m.neuron, beta)) << ',';
        const double bz = eval_network(net, beta).final_output();
        row << fmt12(bz) << ',' << output_name(decode(bz, enc)) << '\n';
        return row.str();
    });
    for (const auto& r : rows) csv << r;
    emit(a.out, csv.str(), out);
    return kOk;
}

struct TradeoffArgs {
    std::string gate = "NOT", knob = "eps1", out, inset, band = "additive";
    std::vector<double> grid{2, 5, 10, 20};
    double tau = 1e8, spread = 0.05, delta = 0.1, eps_z = 0.1, beta0 = 0.5;
    std::size_t inset_points = 11;
    std::uint64_t seed = 7;
};

int cmd_tradeoff(const TradeoffArgs& a, std::ostream& out) {
    TradeoffConfig cfg;
    cfg.gate = parse_gate(a.gate);
    cfg.knob = parse_knob(a.knob);
    cfg.spread = a.spread;
    cfg.tau = a.tau;
    cfg.beta0 = a.beta0;
    cfg.design.eps_z = a.eps_z;
    cfg.design.trainer.seed = a.seed;
    if (!(a.tau >= 0.0)) throw ConfigError("--tau must be >= 0");
    const Encoding enc(cfg.design.machine.beta_hot, cfg.design.machine.beta_cold, a.delta, parse_band(a.band));

    const auto points = parallel_map(a.grid.size(), [&](std::size_t i) {
        TradeoffConfig one = cfg;
        one.grid = {a.grid[i]};
        return tradeoff_sweep(one, enc).front();
    });

    std::ostringstream csv;
    csv << "# " << kUnitsNote << "; gate=" << gate_name(cfg.gate) << " tau=" << fmt12(a.tau)
        << " C=" << fmt12(a.spread) << " delta=" << fmt12(a.delta) << " band=" << band_name(enc.band())
        << " seed=" << a.seed << "\n";
    csv << "knob,avg_sigma,avg_xi,avg_invalid\n";
    for (const auto& p : points) {
        csv << fmt12(p.knob) << ',' << fmt12(p.avg_sigma) << ',' << fmt12(p.avg_xi) << ','
            << fmt12(p.avg_invalid) << '\n';
    }
    emit(a.out, csv.str(), out);

    if (!a.inset.empty()) {
        if (cfg.gate != Gate::Not) throw ConfigError("--inset is available for the NOT gate");
        const std::size_t npts = std::max<std::size_t>(a.inset_points, 2);
        const auto rows = parallel_map(a.grid.size() * npts, [&](std::size_t idx) {
            const double knob = a.grid[idx / npts];
            const NeuronSpec s = tradeoff_machine(cfg, knob);
            const double b1 = enc.beta_hot() + (enc.beta_cold() - enc.beta_hot()) *
                                                   static_cast<double>(idx % npts) / static_cast<double>(npts - 1);
            const double in[] = {b1};
            const Trajectory t = evolve_quasi_static(s, in, 0.5 * (enc.beta_hot() + enc.beta_cold()), a.tau);
            return fmt12(knob) + ',' + fmt12(b1) + ',' + fmt12(accumulated_dissipation(t, s, in)) + '\n';
        });
        std::string inset = std::string("# ") + kUnitsNote + "\nknob,beta_1,sigma\n";
        for (const auto& r : rows) inset += r;
        emit(a.inset, inset, out);
    }
    return kOk;
}

struct VerifyArgs {
    std::string machine, table, band = "additive";
    double delta = 0.1, spread = 0.05;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
    const MachineFile m = load_machine(a.machine);
    const TruthTable table = load_truth_table(a.table);
    check_arity(m, table.n);
    const Encoding enc = machine_encoding(m, a.delta, a.band);
    const NetworkSpec net = m.as_network();
    const std::vector<double> means = network_means(net, enc);
    const ChannelStats stats = conditional_outputs(means, enc, a.spread);

    std::size_t good = 0;
    std::vector<std::size_t> bad;
    out << "# rows: inputs : expected | beta_z_inf | decoded | p(not correct) at C=" << fmt12(a.spread) << "\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const Output y = decode(means[r], enc);
        const int want = table.outputs[r];
        const bool ok = y == (want ? Output::One : Output::Zero);
        if (ok) {
            ++good;
        } else {
            bad.push_back(r);
        }
        out << bits_text(table.inputs(r)) << " : " << want << " | " << fmt12(means[r]) << " | "
            << output_name(y) << " | " << fmt12(1.0 - stats.p_y_given_x[r][want]) << " | "
            << (ok ? "ok" : "FAIL") << "\n";
    }
    const ErrorRates e = average_error(stats, table);
    out << good << "/" << table.rows() << " rows correct; <xi> = " << fmt12(e.xi)
        << ", <invalid> = " << fmt12(e.invalid) << "\n";
    if (!bad.empty()) {
        out << "failing rows:";
        for (std::size_t r : bad) out << " [" << bits_text(table.inputs(r)) << "]";
        out << "\n";
        return kFailed;
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Thermodynamic neuron simulator and designer (natural units, k_B = hbar = 1)",
                 "thermoneuron"};
    app.require_subcommand(1);

    DesignArgs da;
    auto* design = app.add_subcommand("design", "compile a gate or truth table into a machine file");
    design->add_option("--gate", da.gate, "NOT, NOR or MAJ3");
    design->add_option("--table", da.table, "truth table file (lines 'b1 ... bn : r')");
    design->add_option("--alpha", da.alpha, "steepness scale")->capture_default_str();
    design->add_option("--eps-z", da.eps_z, "nominal target gap")->capture_default_str();
    design->add_option("--seed", da.seed, "training seed")->capture_default_str();
    design->add_option("--layers", da.layers, "network layer sizes, e.g. 2,1");
    design->add_option("--out", da.out, "output path (default stdout)");

    SteadyArgs sa;
    auto* steady = app.add_subcommand("steady", "exact steady-state output");
    steady->add_option("machine", sa.machine)->required();
    steady->add_option("--inputs", sa.inputs, "input inverse temperatures");
    steady->add_option("--delta", sa.delta)->capture_default_str();
    steady->add_option("--band", sa.band, "additive or multiplicative")->capture_default_str();
    steady->add_flag("--json", sa.json);

    SimulateArgs ma;
    auto* simulate = app.add_subcommand("simulate", "time evolution of the reservoir temperature");
    simulate->add_option("machine", ma.machine)->required();
    simulate->add_option("--inputs", ma.inputs);
    simulate->add_option("--tau", ma.tau)->capture_default_str();
    simulate->add_option("--mode", ma.mode, "quasi or full")->capture_default_str();
    simulate->add_option("--beta-z0", ma.beta_z0, "initial reservoir beta (default: rail midpoint)");
    simulate->add_option("--out", ma.out);

    SweepArgs wa;
    auto* sweep = app.add_subcommand("sweep", "transfer characteristic over an input grid");
    sweep->add_option("machine", wa.machine)->required();
    sweep->add_option("--grid", wa.grid, "lo:hi:count, once per input");
    sweep->add_option("--delta", wa.delta)->capture_default_str();
    sweep->add_option("--band", wa.band)->capture_default_str();
    sweep->add_option("--out", wa.out);

    TradeoffArgs ta;
    auto* tradeoff = app.add_subcommand("tradeoff", "average dissipation versus average error");
    tradeoff->add_option("--gate", ta.gate)->capture_default_str();
    tradeoff->add_option("--knob", ta.knob, "eps1 or alpha")->capture_default_str();
    tradeoff->add_option("--grid", ta.grid, "comma separated knob values")->delimiter(',');
    tradeoff->add_option("--tau", ta.tau)->capture_default_str();
    tradeoff->add_option("--C", ta.spread, "response spread")->capture_default_str();
    tradeoff->add_option("--delta", ta.delta)->capture_default_str();
    tradeoff->add_option("--band", ta.band)->capture_default_str();
    tradeoff->add_option("--eps-z", ta.eps_z)->capture_default_str();
    tradeoff->add_option("--beta0", ta.beta0)->capture_default_str();
    tradeoff->add_option("--seed", ta.seed)->capture_default_str();
    tradeoff->add_option("--inset", ta.inset, "also write Sigma(beta_1) curves to this path");
    tradeoff->add_option("--inset-points", ta.inset_points)->capture_default_str();
    tradeoff->add_option("--out", ta.out);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "check a machine against a truth table");
    verify->add_option("machine", va.machine)->required();
    verify->add_option("--table", va.table)->required();
    verify->add_option("--delta", va.delta)->capture_default_str();
    verify->add_option("--C", va.spread)->capture_default_str();
    verify->add_option("--band", va.band)->capture_default_str();

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (design->parsed()) return cmd_design(da, out, err);
        if (steady->parsed()) return cmd_steady(sa, out);
        if (simulate->parsed()) return cmd_simulate(ma, out);
        if (sweep->parsed()) return cmd_sweep(wa, out);
        if (tradeoff->parsed()) return cmd_tradeoff(ta, out);
        if (verify->parsed()) return cmd_verify(va, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const SeparabilityError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DesignError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const StructuralError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}

}  // namespace thermoneuron::cli
