#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "cbc/constraints.hpp"
#include "cbc/error.hpp"
#include "cbc/evaluate.hpp"
#include "cbc/ingest.hpp"
#include "cbc/kmeans.hpp"
#include "cbc/oracle.hpp"
#include "cbc/pipeline.hpp"
#include "cbc/report.hpp"

namespace py = pybind11;
using namespace cbc;

namespace {

// Structured results cross the boundary as JSON text; the Python package
// decodes them into plain dicts.

std::string evaluate(const CandidateDataset& dataset, ConstraintSpec spec, std::optional<std::size_t> k,
                     std::uint64_t seed, std::size_t restarts,
                     const std::optional<std::map<std::string, double>>& weights, const std::string& timestamp) {
    if (k) spec.k = static_cast<std::int64_t>(*k);
    const auto binding = bind_and_validate(dataset, spec);
    if (!binding.accepted()) {
        const auto& e = binding.errors.front();
        throw ParseError(e.locator, e.message);
    }
    CBCConfig config;
    config.kmeans.seed = seed;
    config.kmeans.restarts = restarts;
    if (!spec.k) config.kmeans.k = default_k(dataset, seed);
    const auto w = weights ? WeightVector::from_map(*weights, dataset.schema()) : WeightVector::uniform(dataset.schema());
    const auto result = run_pipeline(dataset, spec, config);
    RunMetadata meta;
    meta.seed = seed;
    meta.restarts = restarts;
    meta.config_digest = config_digest(spec, config);
    meta.dataset_digest = dataset_digest(dataset);
    meta.user_spec = spec.user_spec;
    return report_to_json(rank(result, dataset, w, meta), timestamp.empty() ? rfc3339_utc_now() : timestamp).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Constraint-based clustering and evaluation of SaaS candidates";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);
    py::register_exception<AssignmentDeadlock>(m, "AssignmentDeadlock", PyExc_RuntimeError);

    py::class_<CandidateDataset>(m, "Dataset")
        .def_property_readonly("ids",
                               [](const CandidateDataset& d) {
                                   std::vector<std::string> ids;
                                   for (const auto& c : d.candidates()) ids.push_back(c.id);
                                   return ids;
                               })
        .def_property_readonly("attributes", [](const CandidateDataset& d) { return d.schema().names(); })
        .def_property_readonly("capability_columns", &CandidateDataset::capability_columns)
        .def_property_readonly("ratings",
                               [](const CandidateDataset& d) {
                                   std::vector<std::vector<double>> rows;
                                   for (const auto& c : d.candidates()) rows.push_back(c.ratings);
                                   return rows;
                               })
        .def_property_readonly("constraints_ratings",
                               [](const CandidateDataset& d) {
                                   std::vector<double> out;
                                   for (const auto& c : d.candidates()) out.push_back(c.constraints_rating);
                                   return out;
                               })
        .def_property_readonly("points", &CandidateDataset::points, "Normalized ratings in [0, 1]")
        .def("serialize", &serialize_dataset)
        .def("__len__", &CandidateDataset::size)
        .def("__repr__", [](const CandidateDataset& d) {
            return "<Dataset " + std::to_string(d.size()) + " candidates x " + std::to_string(d.schema().size()) +
                   " attributes>";
        });

    py::class_<ConstraintSpec>(m, "ConstraintSpec")
        .def_property_readonly("k", [](const ConstraintSpec& s) { return s.k; })
        .def_property_readonly("feasibility_threshold", [](const ConstraintSpec& s) { return s.feasibility_threshold; })
        .def_property_readonly("must_link", [](const ConstraintSpec& s) { return s.must_link; })
        .def_property_readonly("cannot_link", [](const ConstraintSpec& s) { return s.cannot_link; })
        .def("to_json", [](const ConstraintSpec& s) { return constraint_spec_to_json(s).dump(); });

    m.def("parse_dataset", &parse_dataset, py::arg("csv_text"), py::arg("scale_min") = 1.0,
          py::arg("scale_max") = 10.0);
    m.def("load_dataset", [](const std::string& path) { return parse_dataset(read_text_file(path)); },
          py::arg("path"));
    m.def("parse_constraint_spec", &parse_constraint_spec, py::arg("json_text"), py::arg("scale_min") = 1.0,
          py::arg("scale_max") = 10.0);

    m.def(
        "fit_kmeans_json",
        [](const CandidateDataset& d, std::size_t k, std::uint64_t seed, std::size_t restarts,
           std::size_t max_iterations) {
            KMeansConfig config;
            config.k = k;
            config.seed = seed;
            config.restarts = restarts;
            config.max_iterations = max_iterations;
            return clustering_to_json(fit_kmeans(d, config)).dump();
        },
        py::arg("dataset"), py::arg("k"), py::arg("seed") = 0, py::arg("restarts") = 1,
        py::arg("max_iterations") = 100);

    m.def(
        "detect_deadlock_json",
        [](const ConstraintSpec& spec, const CandidateDataset& d, std::size_t k) {
            return deadlock_to_json(detect_deadlock(spec, d, k)).dump();
        },
        py::arg("spec"), py::arg("dataset"), py::arg("k"));

    m.def("evaluate_json", &evaluate, py::arg("dataset"), py::arg("spec"), py::arg("k") = std::nullopt,
          py::arg("seed") = 42, py::arg("restarts") = 10, py::arg("weights") = std::nullopt,
          py::arg("timestamp") = "");

    m.def(
        "brute_force_min_sse",
        [](const CandidateDataset& d, std::size_t k, const std::optional<ConstraintSpec>& spec) {
            const auto r = oracle::brute_force_min_sse(d, k, spec);
            return py::make_tuple(r.feasible, r.optimum_sse, r.best.assignment);
        },
        py::arg("dataset"), py::arg("k"), py::arg("spec") = std::nullopt,
        "Returns (feasible, optimum_sse, assignment).");

    m.def(
        "brute_force_feasible_exists",
        [](const ConstraintSpec& spec, const CandidateDataset& d, std::size_t k) {
            const auto r = oracle::brute_force_feasible_exists(spec, d, k);
            return py::make_tuple(r.exists, r.assignment, r.refutation);
        },
        py::arg("spec"), py::arg("dataset"), py::arg("k"), "Returns (exists, witness, refutation).");
}
