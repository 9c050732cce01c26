#include <complex>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wiggly/wiggly.hpp"

namespace {

using namespace wiggly;

// Accepts "i", "-i", "0", "-2", "a+bi", "a-bi", "bi" or "a,b".
std::complex<double> parse_complex(const std::string& text) {
    std::string t;
    for (char ch : text)
        if (ch != ' ') t += ch;
    if (t.empty()) throw DataError("empty complex value");
    const auto comma = t.find(',');
    try {
        if (comma != std::string::npos) return {std::stod(t.substr(0, comma)), std::stod(t.substr(comma + 1))};
        if (t.back() != 'i') return {std::stod(t), 0.0};
        t.pop_back();
        // split at the last sign that is not part of an exponent
        std::size_t cut = std::string::npos;
        for (std::size_t k = t.size(); k-- > 1;)
            if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
                cut = k;
                break;
            }
        auto coef = [](const std::string& s) {
            if (s.empty() || s == "+") return 1.0;
            if (s == "-") return -1.0;
            return std::stod(s);
        };
        if (cut == std::string::npos) return {0.0, coef(t)};
        return {std::stod(t.substr(0, cut)), coef(t.substr(cut))};
    } catch (const std::logic_error&) {
        throw DataError("cannot parse complex value: " + text);
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for writing: " + path);
    f << text;
    if (!f) throw DataError("write failed: " + path);
}

nlohmann::json read_report(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open report: " + path);
    nlohmann::json r;
    try {
        r = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("report is not JSON: ") + e.what());
    }
    const auto errors = validate_report(r);
    if (!errors.empty()) throw DataError("report fails schema validation: " + errors.front());
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiscale wiggliness analysis of sampled continua"};
    app.require_subcommand(1);

    GeneratorSpec spec;
    std::string c_text = "i", gen_out, gen_csv;
    auto* gen = app.add_subcommand("generate", "Write a corpus sample as a JSONL dataset");
    gen->add_option("--family", spec.family, "Generator family")->required()->check(CLI::IsMember(generator_families()));
    gen->add_option("--level", spec.level, "Construction level (family default when omitted)");
    gen->add_option("--resolution", spec.resolution, "Target resolution h (family default when omitted)");
    gen->add_option("--alpha", spec.alpha, "Cantor ratio for cantor_alpha and comb_R_alpha");
    gen->add_option("--copies", spec.copies, "comb_R_alpha: number of copies");
    gen->add_option("--slices", spec.slices, "cone_join/product_lift: 2^slices height steps");
    gen->add_option("--base", spec.base, "cone_join/product_lift base set")->check(CLI::IsMember({"cantor_third", "cantor_alpha"}));
    gen->add_option("--c", c_text, "Julia parameter, e.g. i, -2, 0, -1.5436890126920764");
    gen->add_option("--depth", spec.depth, "Julia preimage depth");
    gen->add_option("--seed-count", spec.seed_count, "Julia repelling fixed points used as seeds");
    gen->add_option("-o,--output", gen_out, "Dataset path (stdout when omitted)");
    gen->add_option("--csv", gen_csv, "Also write a CSV mirror");

    AnalyzeOptions ao;
    std::string dataset_path, report_out, atoms_csv, variant = "universal";
    bool all = false;
    double c_const = 1.0, cp_const = 1.0, C_const = 1.0;
    auto* ana = app.add_subcommand("analyze", "Analyze a dataset and write a JSON report");
    ana->add_option("dataset", dataset_path, "Dataset path")->required();
    ana->add_flag("--beta", ao.beta, "Beta profiles");
    ana->add_flag("--density", ao.density, "Wiggly and flat densities");
    ana->add_flag("--porosity", ao.porosity, "Non-porosity densities");
    ana->add_flag("--convex", ao.convex, "Convex density profiles");
    ana->add_flag("--corona", ao.corona, "Corona measure, structure check and scaling audit");
    ana->add_flag("--dimension", ao.dimension, "Box dimension, local dimensions and bound table");
    ana->add_flag("--all", all, "Everything above");
    ana->add_option("--lambda", ao.lambda, "Scale ratio in (0,1)")->capture_default_str();
    ana->add_option("--M", ao.M, "Wiggliness budget of the stopping scale")->capture_default_str();
    ana->add_option("--beta0", ao.beta0, "Wiggly threshold")->capture_default_str();
    ana->add_option("--eps", ao.eps, "E-density parameter of the corona construction")->capture_default_str();
    ana->add_option("--n-max", ao.n_max, "Corona depth limit")->capture_default_str();
    ana->add_option("--variant", variant, "Corona variant")->check(CLI::IsMember({"universal", "avoiding"}))->capture_default_str();
    ana->add_option("--porosity-eps", ao.porosity_eps, "Porosity ratio in (0,1/2)")->capture_default_str();
    ana->add_option("--points", ao.points, "Base points for per-point analyses")->capture_default_str();
    ana->add_option("--probes", ao.probes, "Scaling audit probes")->capture_default_str();
    ana->add_option("--guard", ao.resolution_guard, "Resolution guard for beta")->capture_default_str();
    ana->add_option("--box-guard", ao.box_guard, "Finest box side in units of h")->capture_default_str();
    ana->add_option("--const-c", c_const, "Bound constant c")->capture_default_str();
    ana->add_option("--const-c-prime", cp_const, "Bound constant c'")->capture_default_str();
    ana->add_option("--const-C", C_const, "Bound constant C")->capture_default_str();
    ana->add_option("-o,--output", report_out, "Report path (stdout when omitted)");
    ana->add_option("--atoms-csv", atoms_csv, "Write corona atoms as CSV (x, y, mass)");

    std::string report_path, kind = "loglog", plot_out;
    std::size_t index = 0;
    int max_level = 3;
    auto* plot = app.add_subcommand("plot", "Render a report section as SVG");
    plot->add_option("report", report_path, "Report path")->required();
    plot->add_option("--kind", kind, "loglog, profile or tree")->check(CLI::IsMember({"loglog", "profile", "tree"}));
    plot->add_option("--index", index, "Base point index for profile plots");
    plot->add_option("--max-level", max_level, "Deepest corona level drawn");
    plot->add_option("-o,--output", plot_out, "SVG path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            spec.c = parse_complex(c_text);
            const auto g = generate(spec);
            const auto d = dataset_from(g);
            std::ostringstream os;
            write_dataset(os, d);
            write_text(gen_out, os.str());
            if (!gen_csv.empty()) {
                std::ostringstream cs;
                write_dataset_csv(cs, d.sample);
                write_text(gen_csv, cs.str());
            }
        } else if (*ana) {
            if (all) ao.all();
            if (!ao.any()) throw DataError("no analysis selected (use --all or one of --beta --density ...)");
            ao.variant = variant == "avoiding" ? Variant::avoiding : Variant::universal;
            ao.constants.c = c_const;
            ao.constants.c_prime = cp_const;
            ao.constants.C = C_const;
            const auto d = read_dataset_file(dataset_path);
            const auto r = analyze(d, ao);
            const auto errors = validate_report(r);
            if (!errors.empty()) throw InternalError("report fails its own schema: " + errors.front());
            write_text(report_out, r.dump(1) + "\n");
            if (!atoms_csv.empty()) {
                CoronaOptions co;
                co.variant = ao.variant;
                co.M = ao.M;
                co.eps = ao.eps;
                co.n_max = ao.n_max;
                co.lambda = ao.lambda;
                co.geom.resolution_guard = ao.resolution_guard;
                const auto mu = build_corona(d.sample, co);
                std::ostringstream cs;
                cs << "x,y,mass\n";
                for (const auto& a : mu.atoms) {
                    const auto& p = d.sample.points[a.point];
                    cs << fmt17(p[0]) << ',' << fmt17(p[1]) << ',' << fmt17(a.mass) << '\n';
                }
                write_text(atoms_csv, cs.str());
            }
        } else if (*plot) {
            const auto r = read_report(report_path);
            std::string out;
            if (kind == "loglog") out = svg::loglog(r);
            else if (kind == "profile") out = svg::profile(r, index);
            else out = svg::tree(r, max_level);
            write_text(plot_out, out);
        }
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
