#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fisherspike/io.hpp"

namespace py = pybind11;
using namespace fisherspike;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spiked-eigenvalue limits, support sets and estimators for "
              "high-dimensional Fisher matrices";

    auto err = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<AtomCollision>(m, "AtomCollision", err);
    py::register_exception<DegenerateDenominator>(m, "DegenerateDenominator", err);
    py::register_exception<NoCriticalPoint>(m, "NoCriticalPoint", err);
    py::register_exception<NotOutsideSupport>(m, "NotOutsideSupport", err);
    py::register_exception<NoRoot>(m, "NoRoot", err);
    py::register_exception<AllExcluded>(m, "AllExcluded", err);
    py::register_exception<ZeroEigenvalue>(m, "ZeroEigenvalue", err);
    py::register_exception<ZeroDenominator>(m, "ZeroDenominator", err);
    py::register_exception<BadDimension>(m, "BadDimension", err);
    py::register_exception<SingularS2>(m, "SingularS2", err);

    py::class_<SpectralMeasure>(m, "SpectralMeasure")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("locations"),
             py::arg("weights"))
        .def_static("point_mass", &SpectralMeasure::point_mass, py::arg("location"))
        .def_property_readonly("locations", &SpectralMeasure::locations)
        .def_property_readonly("weights", &SpectralMeasure::weights)
        .def("distance_to", &SpectralMeasure::distance_to, py::arg("x"))
        .def("in_support", &SpectralMeasure::in_support, py::arg("x"), py::arg("delta"))
        .def("default_delta", &SpectralMeasure::default_delta);

    py::class_<AspectRatios>(m, "AspectRatios")
        .def(py::init<double, double>(), py::arg("c1"), py::arg("c2"))
        .def_readonly("c1", &AspectRatios::c1)
        .def_readonly("c2", &AspectRatios::c2)
        .def("h_squared", &AspectRatios::h_squared);

    py::class_<Spike>(m, "Spike")
        .def(py::init<double, std::vector<int>>(), py::arg("alpha"), py::arg("ranks"))
        .def_readonly("alpha", &Spike::alpha)
        .def_readonly("multiplicity", &Spike::multiplicity)
        .def_readonly("ranks", &Spike::ranks);

    py::enum_<SpikeKind>(m, "SpikeKind")
        .value("Distant", SpikeKind::Distant)
        .value("CloseBelow", SpikeKind::CloseBelow)
        .value("CloseAbove", SpikeKind::CloseAbove)
        .value("Undefined", SpikeKind::Undefined);

    py::class_<SpikeClassification>(m, "SpikeClassification")
        .def_readonly("kind", &SpikeClassification::kind)
        .def_readonly("critical_point", &SpikeClassification::critical_point)
        .def_readonly("limit", &SpikeClassification::limit);

    py::class_<SupportSet>(m, "SupportSet")
        .def_readonly("intervals", &SupportSet::intervals)
        .def("contains", &SupportSet::contains, py::arg("x"), py::arg("dilation") = 0.0)
        .def("interior_gaps", &SupportSet::interior_gaps)
        .def("lower_edge", &SupportSet::lower_edge)
        .def("upper_edge", &SupportSet::upper_edge);

    py::class_<EigenSample>(m, "EigenSample")
        .def(py::init<std::vector<double>, int, int>(), py::arg("values"), py::arg("n1"),
             py::arg("n2"))
        .def_readonly("values", &EigenSample::values)
        .def_readonly("p", &EigenSample::p)
        .def_readonly("n1", &EigenSample::n1)
        .def_readonly("n2", &EigenSample::n2)
        .def("value_at_rank", &EigenSample::value_at_rank, py::arg("rank"));

    py::class_<StieltjesPair>(m, "StieltjesPair")
        .def_readonly("m", &StieltjesPair::m)
        .def_readonly("m_underline", &StieltjesPair::m_underline)
        .def_readonly("x", &StieltjesPair::x);

    py::class_<CompanionRoot>(m, "CompanionRoot")
        .def_readonly("m0", &CompanionRoot::m0)
        .def_readonly("x", &CompanionRoot::x);

    py::class_<MHatResult>(m, "MHatResult")
        .def_readonly("m_hat", &MHatResult::m_hat)
        .def_readonly("excluded", &MHatResult::excluded);

    py::class_<SpikeEstimate>(m, "SpikeEstimate")
        .def_readonly("ranks", &SpikeEstimate::ranks)
        .def_readonly("per_rank", &SpikeEstimate::per_rank)
        .def_readonly("rank_errors", &SpikeEstimate::rank_errors)
        .def_readonly("pooled", &SpikeEstimate::pooled)
        .def_readonly("successes", &SpikeEstimate::successes);

    py::enum_<EntryDistribution>(m, "EntryDistribution")
        .value("StandardNormal", EntryDistribution::StandardNormal)
        .value("StandardizedChiSquare2", EntryDistribution::StandardizedChiSquare2)
        .value("UniformSqrt3", EntryDistribution::UniformSqrt3);

    py::class_<PopulationSpec>(m, "PopulationSpec")
        .def(py::init<int, double, std::vector<double>>(), py::arg("p"), py::arg("rho"),
             py::arg("lambda_diagonal"))
        .def_readonly("p", &PopulationSpec::p)
        .def_readonly("rho", &PopulationSpec::rho)
        .def_readonly("lambda_diagonal", &PopulationSpec::lambda_diagonal);

    py::class_<StreamRng>(m, "StreamRng")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("master_seed"),
             py::arg("stream"))
        .def("uniform01", &StreamRng::uniform01)
        .def("normal", &StreamRng::normal)
        .def("draw", &StreamRng::draw, py::arg("dist"));

    py::class_<SpikeGroupConfig>(m, "SpikeGroupConfig")
        .def(py::init([](std::string label, std::vector<int> ranks,
                         std::optional<double> true_value) {
                 return SpikeGroupConfig{std::move(label), std::move(ranks), true_value};
             }),
             py::arg("label"), py::arg("ranks"), py::arg("true_value") = std::nullopt)
        .def_readwrite("label", &SpikeGroupConfig::label)
        .def_readwrite("ranks", &SpikeGroupConfig::ranks)
        .def_readwrite("true_value", &SpikeGroupConfig::true_value);

    py::class_<SimulationConfig>(m, "SimulationConfig")
        .def(py::init<>())
        .def_readwrite("p", &SimulationConfig::p)
        .def_readwrite("n1", &SimulationConfig::n1)
        .def_readwrite("n2", &SimulationConfig::n2)
        .def_readwrite("dist", &SimulationConfig::dist)
        .def_readwrite("reps", &SimulationConfig::reps)
        .def_readwrite("master_seed", &SimulationConfig::master_seed)
        .def_readwrite("rho", &SimulationConfig::rho)
        .def_readwrite("exclusion_ratio", &SimulationConfig::exclusion_ratio)
        .def_readwrite("lambda_head", &SimulationConfig::lambda_head)
        .def_readwrite("lambda_tail", &SimulationConfig::lambda_tail)
        .def_readwrite("spikes", &SimulationConfig::spikes)
        .def_readwrite("out_dir", &SimulationConfig::out_dir)
        .def_readwrite("workers", &SimulationConfig::workers)
        .def("finalize", &SimulationConfig::finalize);

    py::class_<ReplicationRecord>(m, "ReplicationRecord")
        .def_readonly("rep", &ReplicationRecord::rep)
        .def_readonly("stream", &ReplicationRecord::stream)
        .def_readonly("generated", &ReplicationRecord::generated)
        .def_readonly("estimates", &ReplicationRecord::estimates)
        .def_readonly("largest", &ReplicationRecord::largest)
        .def_readonly("smallest", &ReplicationRecord::smallest);

    py::class_<Histogram>(m, "Histogram")
        .def_readonly("edges", &Histogram::edges)
        .def_readonly("counts", &Histogram::counts);

    py::class_<SpikeAggregate>(m, "SpikeAggregate")
        .def_readonly("label", &SpikeAggregate::label)
        .def_readonly("true_value", &SpikeAggregate::true_value)
        .def_readonly("count", &SpikeAggregate::count)
        .def_readonly("mean", &SpikeAggregate::mean)
        .def_readonly("sd", &SpikeAggregate::sd)
        .def_readonly("histogram", &SpikeAggregate::histogram);

    py::class_<AggregateReport>(m, "AggregateReport")
        .def_readonly("per_spike", &AggregateReport::per_spike)
        .def_readonly("records", &AggregateReport::records)
        .def_readonly("successful_reps", &AggregateReport::successful_reps);

    m.def("psi", &psi, py::arg("alpha"), py::arg("H"), py::arg("c"));
    m.def("psi_prime", &psi_prime, py::arg("alpha"), py::arg("H"), py::arg("c"));
    m.def("condition_ii", &condition_ii, py::arg("alpha"), py::arg("H"), py::arg("c"));
    m.def("is_distant_spike", &is_distant_spike, py::arg("alpha"), py::arg("H"),
          py::arg("c"), py::arg("delta"));
    m.def("phase_transition_limit",
          py::overload_cast<double, const SpectralMeasure&, const AspectRatios&>(
              &phase_transition_limit),
          py::arg("alpha"), py::arg("H"), py::arg("c"));
    m.def("lsd_support", &lsd_support, py::arg("H"), py::arg("c"));
    m.def("solve_m0", &solve_m0, py::arg("x"), py::arg("H"), py::arg("c"));
    m.def("population_m_pair", &population_m_pair, py::arg("x"), py::arg("H"), py::arg("c"));

    m.def("empirical_m_hat", &empirical_m_hat, py::arg("sample"), py::arg("rank"),
          py::arg("exclusion_ratio") = kDefaultExclusionRatio);
    m.def("empirical_m_underline_hat", &empirical_m_underline_hat, py::arg("sample"),
          py::arg("rank"), py::arg("exclusion_ratio") = kDefaultExclusionRatio);
    m.def("estimate_spike_at", &estimate_spike_at, py::arg("sample"), py::arg("rank"),
          py::arg("exclusion_ratio") = kDefaultExclusionRatio);
    m.def("estimate_spike_group", &estimate_spike_group, py::arg("sample"), py::arg("ranks"),
          py::arg("exclusion_ratio") = kDefaultExclusionRatio);

    m.def("build_lambda", &build_lambda, py::arg("p"),
          py::arg("head") = std::vector<double>{10.0, 7.5, 7.5},
          py::arg("tail") = std::vector<double>{0.2, 0.2, 0.1});
    m.def("toeplitz_eigvecs", &toeplitz_eigvecs, py::arg("p"), py::arg("rho"));
    m.def("draw_matrix", &draw_matrix, py::arg("dist"), py::arg("rows"), py::arg("cols"),
          py::arg("rng"));
    m.def("sigma1_sqrt", &sigma1_sqrt, py::arg("spec"));
    m.def("fisher_eigenvalues",
          py::overload_cast<const PopulationSpec&, EntryDistribution, int, int, StreamRng&>(
              &fisher_eigenvalues),
          py::arg("spec"), py::arg("dist"), py::arg("n1"), py::arg("n2"), py::arg("rng"));

    m.def("run_replication",
          py::overload_cast<const SimulationConfig&, int>(&run_replication),
          py::arg("config"), py::arg("rep"));
    m.def("run_monte_carlo", &run_monte_carlo, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("write_report", &write_report, py::arg("report"), py::arg("dir"));

    m.def("load_eigen_sample", &load_eigen_sample, py::arg("path"), py::arg("n1"),
          py::arg("n2"));
    m.def("save_eigenvalues", &save_eigenvalues, py::arg("path"), py::arg("values"));
    m.def("load_simulation_config", &load_simulation_config, py::arg("path"));

    m.attr("__version__") = "0.1.0";
}
