#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tslp/coder.hpp"
#include "tslp/compressor.hpp"
#include "tslp/dag.hpp"
#include "tslp/grammar.hpp"
#include "tslp/harness.hpp"
#include "tslp/sources.hpp"
#include "tslp/term.hpp"

namespace py = pybind11;
using namespace tslp;

namespace {

CompressorId algo_of(const std::string& name) {
    if (name == "bisection") return CompressorId::Bisection;
    if (name == "dag") return CompressorId::DagRoute;
    throw std::invalid_argument("algo must be 'bisection' or 'dag'");
}

EncoderId encoder_of(const std::string& name) {
    if (name == "tslp") return EncoderId::Tslp;
    if (name == "dag") return EncoderId::Dag;
    throw std::invalid_argument("encoder must be 'tslp' or 'dag'");
}

std::string to_string(const BigRational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_tslpcodec, m) {
    m.doc() = "grammar-based compression and universal coding of binary trees";

    m.def(
        "compress",
        [](const std::string& tree, const std::string& algo) {
            std::vector<std::uint8_t> bytes =
                write_container(compress(parse_term(tree), algo_of(algo)));
            return py::bytes(reinterpret_cast<const char*>(bytes.data()),
                             bytes.size());
        },
        py::arg("tree"), py::arg("algo") = "bisection",
        "Compress a tree text like 'f(f(a,a),a)' into a .tslp container.");

    m.def(
        "decompress",
        [](const py::bytes& blob) {
            std::string raw = blob;
            std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
            return serialize_term(eval(read_container(bytes)));
        },
        py::arg("data"), "Restore the tree text from a .tslp container.");

    m.def(
        "codeword",
        [](const std::string& tree, const std::string& algo) {
            return encode(compress(parse_term(tree), algo_of(algo))).to_string();
        },
        py::arg("tree"), py::arg("algo") = "bisection",
        "The prefix-free codeword of a tree, as a '0'/'1' string.");

    m.def(
        "grammar_text",
        [](const std::string& tree, const std::string& algo) {
            return serialize_grammar(compress(parse_term(tree), algo_of(algo)));
        },
        py::arg("tree"), py::arg("algo") = "bisection",
        "Human-readable grammar produced for a tree.");

    m.def(
        "grammar_size",
        [](const std::string& tree, const std::string& algo) {
            return compress(parse_term(tree), algo_of(algo)).size();
        },
        py::arg("tree"), py::arg("algo") = "bisection");

    m.def(
        "dag_size",
        [](const std::string& tree) {
            std::ostringstream os;
            os << dag_size(build_minimal_dag(parse_term(tree)));
            return os.str();
        },
        py::arg("tree"), "Number of distinct subtrees plus one, as a decimal string.");

    m.def(
        "sample",
        [](const std::string& source, std::uint64_t class_index, std::uint64_t seed) {
            return serialize_term(sample(parse_source(source), class_index, seed));
        },
        py::arg("source"), py::arg("class_index"), py::arg("seed") = 1,
        "Draw a tree from a source ('bst', 'depth-uniform', 'leaf-balanced:<c>', ...).");

    m.def(
        "prob",
        [](const std::string& source, const std::string& tree) {
            return to_string(prob_tree(parse_source(source), parse_term(tree)));
        },
        py::arg("source"), py::arg("tree"),
        "Exact tree probability as a 'p/q' string.");

    m.def(
        "prob_log2",
        [](const std::string& source, const std::string& tree) {
            return prob_tree_log2(parse_source(source), parse_term(tree));
        },
        py::arg("source"), py::arg("tree"));

    m.def(
        "gamma",
        [](const std::string& algo, std::uint32_t n, std::uint64_t budget,
           std::uint64_t samples, std::uint64_t seed) {
            return samples == 0 ? gamma_exhaustive(algo_of(algo), n, budget)
                                : gamma_sampled(algo_of(algo), n, samples, seed);
        },
        py::arg("algo"), py::arg("n"), py::arg("budget") = 1u << 20,
        py::arg("samples") = 0, py::arg("seed") = 1,
        "Worst-case grammar/tree size ratio; samples=0 means exhaustive.");

    m.def(
        "redundancy",
        [](const std::string& source, const std::string& encoder,
           std::uint64_t class_index, bool exact, std::uint64_t budget,
           std::uint64_t samples, std::uint64_t seed) {
            TreeSource src = parse_source(source);
            EncoderId enc = encoder_of(encoder);
            RedundancyReport r =
                exact ? redundancy_exact(enc, src, class_index, budget)
                      : redundancy_sampled(enc, src, class_index, samples, seed);
            py::dict d;
            d["class_index"] = r.class_index;
            d["min_size"] = r.min_size;
            d["count"] = r.count;
            d["exact"] = r.exact;
            d["value"] = r.value;
            d["witness"] = r.witness;
            if (r.exact) d["average"] = r.average;
            return d;
        },
        py::arg("source"), py::arg("encoder"), py::arg("class_index"),
        py::arg("exact") = false, py::arg("budget") = 1u << 20,
        py::arg("samples") = 1000, py::arg("seed") = 1);

    m.def(
        "verify_domination",
        [](const std::string& source, std::uint32_t n_max) {
            CheckReport r = verify_domination(parse_source(source), n_max);
            return py::make_tuple(r.ok(), r.findings, r.skipped);
        },
        py::arg("source"), py::arg("n_max") = 6);

    m.def(
        "verify_entropy_bound",
        [](const std::string& source, const std::string& encoder,
           const std::vector<std::uint64_t>& classes, std::uint64_t samples,
           std::uint64_t seed) {
            CheckReport r = verify_entropy_bound(parse_source(source),
                                                 encoder_of(encoder), classes,
                                                 samples, seed);
            return py::make_tuple(r.ok(), r.findings, r.skipped);
        },
        py::arg("source"), py::arg("encoder"), py::arg("classes"),
        py::arg("samples") = 20, py::arg("seed") = 1);
}
