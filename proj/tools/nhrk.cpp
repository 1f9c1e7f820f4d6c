#include "nhrk/errors.hpp"
#include "nhrk/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

using nhrk::Matrix;
using nhrk::Vector;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

nlohmann::json to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json tableau_json(const nhrk::PartitionedTableau& t) {
    const auto& c = t.cert;
    const auto hyp = t.hypotheses();
    return {{"stages", t.stages()},
            {"a", to_json(t.primal.a)},
            {"b", to_json(t.primal.b)},
            {"c", to_json(t.primal.c)},
            {"a_hat", to_json(t.dual.a)},
            {"b_hat", to_json(t.dual.b)},
            {"c_hat", to_json(t.dual.c)},
            {"certificate",
             {{"p", c.p}, {"q", c.q}, {"r", c.r}, {"p_hat", c.p_hat}, {"q_hat", c.q_hat},
              {"r_hat", c.r_hat}, {"c_chat", c.c_chat}, {"d_dhat", c.d_dhat}, {"chat_c", c.chat_c},
              {"dhat_d", c.dhat_d}, {"r_inf", c.r_inf}}},
            {"symplecticity_residual", t.symplecticity_residual()},
            {"hypotheses",
             {{"h1", hyp.h1}, {"h2_sigma", hyp.h2_sigma}, {"h3", hyp.h3}, {"h1p", hyp.h1p}, {"h2p", hyp.h2p}}}};
}

void tableau_csv(std::ostream& os, const nhrk::PartitionedTableau& t) {
    os << "part,i,j,value\n";
    const auto put = [&os](const char* part, const Matrix& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                os << part << ',' << i << ',' << j << ',' << nhrk::format_value(m(i, j)) << '\n';
    };
    put("a", t.primal.a);
    put("b", t.primal.b);
    put("c", t.primal.c);
    put("a_hat", t.dual.a);
    put("b_hat", t.dual.b);
    put("c_hat", t.dual.c);
    const auto& c = t.cert;
    for (const auto& [name, value] :
         {std::pair{"p", double(c.p)}, std::pair{"q", double(c.q)}, std::pair{"r", double(c.r)},
          std::pair{"p_hat", double(c.p_hat)}, std::pair{"q_hat", double(c.q_hat)},
          std::pair{"r_hat", double(c.r_hat)}, std::pair{"r_inf", c.r_inf}})
        os << name << ",0,0," << nhrk::format_value(value) << '\n';
}

/// Writes to `path`, or stdout when empty or "-".
template <class F>
void emit(const std::string& path, F&& writer) {
    if (path.empty() || path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nhrk::ConfigError("cannot open output file '" + path + "'");
    writer(out);
}

nhrk::RunConfig load(const std::string& config, const std::vector<std::string>& overrides,
                     const std::string& out) {
    nhrk::RunConfig cfg = config.empty() ? nhrk::RunConfig{} : nhrk::parse_config(config);
    for (const auto& o : overrides) nhrk::apply_override(cfg, o);
    if (!out.empty()) cfg.output = out;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonholonomic partitioned Runge-Kutta integrators"};
    app.require_subcommand(1);

    std::string config, out, family = "lobatto";
    std::vector<std::string> overrides;
    int stages = 2;
    bool as_json = false, as_csv = false;

    auto* tab = app.add_subcommand("tableau", "Print a Lobatto IIIA-IIIB pair");
    tab->add_option("--family", family, "Tableau family")->check(CLI::IsMember({"lobatto"}));
    tab->add_option("--stages,-s", stages, "Number of stages")->required();
    auto* json_flag = tab->add_flag("--json", as_json, "JSON output");
    tab->add_flag("--csv", as_csv, "CSV output (default)")->excludes(json_flag);
    tab->add_option("--out", out, "Output path");

    std::vector<CLI::App*> runs;
    for (const auto& [name, desc] :
         {std::pair{"simulate", "Integrate one trajectory"},
          std::pair{"converge", "Order study against a fine reference run"},
          std::pair{"ensemble", "Energy error statistics for the chaotic system"}}) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--config,-c", config, "Config file");
        sub->add_option("--out,-o", out, "Output CSV path");
        sub->add_option("--override", overrides, "key=value, repeatable");
        runs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (tab->parsed()) {
            const auto pair = nhrk::lobatto_pair(stages);
            emit(out, [&](std::ostream& os) {
                if (as_json) os << tableau_json(pair).dump(2) << '\n';
                else tableau_csv(os, pair);
            });
            return 0;
        }
        const nhrk::RunConfig cfg = load(config, overrides, out);
        if (runs[0]->parsed()) {
            const auto traj = nhrk::simulate(cfg);
            emit(cfg.output, [&](std::ostream& os) { nhrk::write_csv(os, traj); });
            if (traj.failed) {
                std::cerr << "step " << traj.failed_step << " failed: " << traj.failure << '\n';
                return kExitSolver;
            }
        } else if (runs[1]->parsed()) {
            const auto rep = nhrk::converge(cfg);
            emit(cfg.output, [&](std::ostream& os) { nhrk::write_csv(os, rep); });
        } else {
            const auto rep = nhrk::ensemble(cfg);
            emit(cfg.output, [&](std::ostream& os) { nhrk::write_csv(os, rep); });
            if (rep.any_failed) std::cerr << "some ensemble members failed and were dropped\n";
        }
    } catch (const nhrk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nhrk::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nhrk::Error& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    return 0;
}
