#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tslp/coder.hpp"
#include "tslp/compressor.hpp"
#include "tslp/dag.hpp"
#include "tslp/grammar.hpp"
#include "tslp/harness.hpp"
#include "tslp/sources.hpp"
#include "tslp/term.hpp"

using namespace tslp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFinding = 1;
constexpr int kExitUsage = 2;

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        return os.str();
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string trimmed(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' '))
        s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

// CSV rows: suite,source,encoder,i,n,mode,value,witness_term,avg_value
class CsvSink {
  public:
    explicit CsvSink(const std::string& path) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw std::runtime_error("cannot open " + path);
        file_ << "suite,source,encoder,i,n,mode,value,witness_term,avg_value\n";
    }
    void row(const std::string& suite, const std::string& source,
             const std::string& encoder, std::uint64_t i, std::uint64_t n,
             const std::string& mode, double value, const std::string& witness,
             const std::string& avg = "") {
        if (!file_.is_open()) return;
        file_ << suite << ',' << source << ',' << encoder << ',' << i << ',' << n
              << ',' << mode << ',' << value << ',' << witness << ',' << avg
              << '\n';
    }

  private:
    std::ofstream file_;
};

CompressorId algo_of(const std::string& name) {
    if (name == "bisection") return CompressorId::Bisection;
    if (name == "dag") return CompressorId::DagRoute;
    throw CLI::ValidationError("--algo", "expected bisection or dag");
}

EncoderId encoder_of(const std::string& name) {
    if (name == "tslp") return EncoderId::Tslp;
    if (name == "dag") return EncoderId::Dag;
    throw CLI::ValidationError("--encoder", "expected tslp or dag");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grammar-based binary tree codec and experiment driver"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 1;
    std::uint64_t budget = 1u << 20;
    std::string csv_path;
    app.add_option("--seed", seed, "random seed for sampled modes");
    app.add_option("--budget", budget, "max trees for exhaustive modes");
    app.add_option("--csv", csv_path, "write results as CSV to this file");

    // compress
    auto* c_cmd = app.add_subcommand("compress", "tree text -> .tslp container");
    std::string c_algo = "bisection", c_in, c_out;
    c_cmd->add_option("--algo", c_algo, "bisection|dag");
    c_cmd->add_option("input", c_in, "tree file, or - for stdin")->required();
    c_cmd->add_option("-o,--output", c_out, "output .tslp path")->required();

    // decompress
    auto* d_cmd = app.add_subcommand("decompress", ".tslp container -> tree text");
    std::string d_in, d_out;
    d_cmd->add_option("input", d_in, ".tslp file")->required();
    d_cmd->add_option("-o,--output", d_out, "output text path (default stdout)");

    // dag-stats
    auto* g_cmd = app.add_subcommand("dag-stats", "sharing statistics of a tree");
    std::string g_in;
    g_cmd->add_option("input", g_in, "tree file, or - for stdin")->required();

    // sample
    auto* s_cmd = app.add_subcommand("sample", "draw trees from a source");
    std::string s_source = "bst";
    std::uint64_t s_index = 0, s_count = 1;
    s_cmd->add_option("--source", s_source, "source spec")->required();
    s_cmd->add_option("--i", s_index, "class index")->required();
    s_cmd->add_option("--count", s_count, "number of trees");

    // redundancy
    auto* r_cmd = app.add_subcommand("redundancy", "worst-case pointwise redundancy");
    std::string r_source = "bst", r_encoder = "tslp";
    std::uint64_t r_imin = 2, r_imax = 2, r_samples = 1000;
    bool r_exact = false;
    r_cmd->add_option("--source", r_source, "source spec")->required();
    r_cmd->add_option("--encoder", r_encoder, "tslp|dag");
    r_cmd->add_option("--i-min", r_imin, "first class index")->required();
    r_cmd->add_option("--i-max", r_imax, "last class index")->required();
    r_cmd->add_flag("--exact", r_exact, "enumerate whole classes (budget-bound)");
    r_cmd->add_option("--samples", r_samples, "samples per class when not exact");

    // verify
    auto* v_cmd = app.add_subcommand("verify", "inequality suites; exit 1 on findings");
    std::string v_suite, v_source = "bst", v_encoder = "tslp";
    std::uint32_t v_nmax = 8;
    std::vector<std::uint64_t> v_classes;
    std::uint64_t v_samples = 20;
    v_cmd->add_option("--suite", v_suite, "domination|entropy")->required();
    v_cmd->add_option("--source", v_source, "source spec");
    v_cmd->add_option("--encoder", v_encoder, "tslp|dag (entropy suite)");
    v_cmd->add_option("--n-max", v_nmax, "size bound (domination suite)");
    v_cmd->add_option("--classes", v_classes, "class indices (entropy suite)");
    v_cmd->add_option("--samples", v_samples, "samples per class (entropy suite)");

    // gamma
    auto* y_cmd = app.add_subcommand("gamma", "worst-case grammar/tree size ratio");
    std::string y_algo = "bisection";
    std::uint32_t y_nmin = 1, y_nmax = 8;
    std::uint64_t y_samples = 0;
    y_cmd->add_option("--algo", y_algo, "bisection|dag");
    y_cmd->add_option("--n-min", y_nmin, "first size");
    y_cmd->add_option("--n-max", y_nmax, "last size");
    y_cmd->add_option("--samples", y_samples,
                      "sample count (0 = exhaustive within budget)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        CsvSink csv(csv_path);

        if (*c_cmd) {
            Term t = parse_term(trimmed(read_text(c_in)));
            write_bytes(c_out, write_container(compress(t, algo_of(c_algo))));
            return kExitOk;
        }
        if (*d_cmd) {
            std::string text = serialize_term(eval(read_container(read_bytes(d_in))));
            if (d_out.empty())
                std::cout << text << "\n";
            else {
                std::ofstream out(d_out);
                if (!out) throw std::runtime_error("cannot open " + d_out);
                out << text << "\n";
            }
            return kExitOk;
        }
        if (*g_cmd) {
            Term t = parse_term(trimmed(read_text(g_in)));
            BigInt d = dag_size(build_minimal_dag(t));
            NormalFormTslp bis = compress(t, CompressorId::Bisection);
            NormalFormTslp dag = compress(t, CompressorId::DagRoute);
            std::cout << "leaves=" << t.size() << " depth=" << t.depth()
                      << " dag_nodes=" << d << " grammar_size=" << bis.size()
                      << " dag_route_grammar_size=" << dag.size() << "\n";
            return kExitOk;
        }
        if (*s_cmd) {
            TreeSource src = parse_source(s_source);
            for (std::uint64_t r = 0; r < s_count; ++r)
                std::cout << serialize_term(sample(src, s_index, seed + r)) << "\n";
            return kExitOk;
        }
        if (*r_cmd) {
            TreeSource src = parse_source(r_source);
            EncoderId enc = encoder_of(r_encoder);
            for (std::uint64_t i = r_imin; i <= r_imax; ++i) {
                RedundancyReport rep =
                    r_exact ? redundancy_exact(enc, src, i, budget)
                            : redundancy_sampled(enc, src, i, r_samples, seed);
                std::cout << "i=" << i << " n_min=" << rep.min_size
                          << (rep.exact ? " R=" : " R>=") << rep.value
                          << " witness=" << rep.witness << "\n";
                std::ostringstream avg;
                if (rep.exact) avg << rep.average;
                csv.row("redundancy", src.name, r_encoder, i, rep.min_size,
                        rep.exact ? "exact" : "sampled", rep.value, rep.witness,
                        avg.str());
            }
            return kExitOk;
        }
        if (*v_cmd) {
            TreeSource src = parse_source(v_source);
            CheckReport rep;
            if (v_suite == "domination") {
                rep = verify_domination(src, v_nmax);
            } else if (v_suite == "entropy") {
                if (v_classes.empty()) v_classes = {63, 255, 1023};
                rep = verify_entropy_bound(src, encoder_of(v_encoder), v_classes,
                                           v_samples, seed);
            } else {
                throw CLI::ValidationError("--suite", "expected domination or entropy");
            }
            for (const std::string& f : rep.findings)
                std::cout << "finding: " << f << "\n";
            for (const std::string& s : rep.skipped)
                std::cout << "skipped: " << s << "\n";
            std::cout << (rep.ok() ? "ok" : "violations found") << " ("
                      << rep.findings.size() << " findings, " << rep.skipped.size()
                      << " skipped)\n";
            return rep.ok() ? kExitOk : kExitFinding;
        }
        if (*y_cmd) {
            CompressorId algo = algo_of(y_algo);
            for (std::uint32_t n = y_nmin; n <= y_nmax; ++n) {
                double g = y_samples == 0
                               ? gamma_exhaustive(algo, n, budget)
                               : gamma_sampled(algo, n, y_samples, seed);
                std::cout << "n=" << n << (y_samples == 0 ? " gamma=" : " gamma>=")
                          << g << "\n";
                csv.row("gamma", "-", y_algo, n, n,
                        y_samples == 0 ? "exact" : "sampled", g, "");
            }
            return kExitOk;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
