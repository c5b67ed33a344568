// Python bindings for the l2v core: spectral filtering, direction-set statistics,
// pattern extraction and injection, .lvt I/O and the toy networks.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "l2v/error.hpp"
#include "l2v/latrep.hpp"
#include "l2v/spectral.hpp"
#include "l2v/steering.hpp"
#include "l2v/tensor_store.hpp"
#include "l2v/toymodel.hpp"
#include "l2v/version.hpp"

namespace py = pybind11;
using namespace l2v;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
    const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
    return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const std::vector<double>& v) {
    return Array(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

Array to_array(const Matrix& m) {
    return Array(std::vector<py::ssize_t>{static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())},
                 m.data().data());
}

latrep::DirectionSet to_dirs(const Array& a, int layer) { return {to_matrix(a), layer, "python", "python"}; }

// nlohmann::json <-> Python through the json module keeps the bindings small.
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::handle& obj) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

steering::SteeringConfig config_from_kwargs(std::size_t k, std::size_t d_source, std::size_t d_target, double alpha,
                                            int layer_source, int layer_target, bool bypass_filter,
                                            const std::string& filter_mode) {
    steering::SteeringConfig cfg;
    cfg.k = k;
    cfg.d_source = d_source;
    cfg.d_target = d_target;
    cfg.alpha = alpha;
    cfg.layer_source = layer_source;
    cfg.layer_target = layer_target;
    cfg.bypass_filter = bypass_filter;
    if (filter_mode == "aggregate") cfg.filter_mode = steering::FilterMode::aggregate;
    else if (filter_mode == "per_sample") cfg.filter_mode = steering::FilterMode::per_sample;
    else fail(ErrorKind::usage, "filter_mode must be 'aggregate' or 'per_sample'");
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "l2v core: low-pass CoT pattern extraction and steering";
    m.attr("__version__") = std::string(kToolkitVersion);

    static py::exception<Error> base(m, "L2VError", PyExc_RuntimeError);
    static py::object usage = py::reinterpret_steal<py::object>(PyErr_NewException("l2vcot._core.UsageError", base.ptr(), nullptr));
    static py::object io = py::reinterpret_steal<py::object>(PyErr_NewException("l2vcot._core.IOError", base.ptr(), nullptr));
    static py::object format = py::reinterpret_steal<py::object>(PyErr_NewException("l2vcot._core.FormatError", base.ptr(), nullptr));
    static py::object dimension = py::reinterpret_steal<py::object>(PyErr_NewException("l2vcot._core.DimensionError", base.ptr(), nullptr));
    static py::object degenerate = py::reinterpret_steal<py::object>(PyErr_NewException("l2vcot._core.DegenerateError", base.ptr(), nullptr));
    m.attr("UsageError") = usage;
    m.attr("IOError") = io;
    m.attr("FormatError") = format;
    m.attr("DimensionError") = dimension;
    m.attr("DegenerateError") = degenerate;
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object cls;
            switch (e.kind()) {
                case ErrorKind::usage: cls = usage; break;
                case ErrorKind::io: cls = io; break;
                case ErrorKind::format: cls = format; break;
                case ErrorKind::dimension: cls = dimension; break;
                case ErrorKind::degenerate: cls = degenerate; break;
            }
            PyErr_SetString(cls.ptr(), e.what());
        }
    });

    // spectral
    m.def("dft_forward", [](const Array& v) { return spectral::dft_forward(to_vector(v)).bins; }, py::arg("v"));
    m.def("dft_inverse", [](const std::vector<std::complex<double>>& bins) {
        return to_array(spectral::dft_inverse(spectral::Spectrum{bins}));
    }, py::arg("bins"));
    m.def("lowpass_mask", &spectral::lowpass_mask, py::arg("d"), py::arg("k"));
    m.def("lowpass_filter", [](const Array& v, std::size_t k) { return to_array(spectral::lowpass_filter(to_vector(v), k)); },
          py::arg("v"), py::arg("k"));
    m.def("spectral_resample", [](const Array& v, std::size_t d_target, std::size_t k) {
        return to_array(spectral::spectral_resample(to_vector(v), d_target, k));
    }, py::arg("v"), py::arg("d_target"), py::arg("k"));
    m.def("band_energies", [](const Array& v, std::size_t n_bands) {
        const auto p = spectral::band_energies(to_vector(v), n_bands);
        return py::make_tuple(to_array(p.energies), p.ranges);
    }, py::arg("v"), py::arg("n_bands"));
    m.def("band_relative_error", [](const Array& a, const Array& b, std::size_t n_bands) {
        return to_array(spectral::band_relative_error(to_vector(a), to_vector(b), n_bands));
    }, py::arg("a"), py::arg("b"), py::arg("n_bands"));

    // latrep
    m.def("mean_pattern", [](const Array& dirs) { return to_array(latrep::mean_pattern(to_dirs(dirs, 0)).values); },
          py::arg("dirs"));
    m.def("covariance_trace", [](const Array& dirs) { return latrep::covariance_trace(to_dirs(dirs, 0)); },
          py::arg("dirs"));
    m.def("pca", [](const Array& dirs, std::size_t n_components) {
        const auto u = to_dirs(dirs, 0);
        const auto model = latrep::pca_fit(u, n_components);
        py::dict out;
        out["mean"] = to_array(model.mean);
        out["components"] = to_array(model.components);
        out["explained_variance"] = to_array(model.explained_variance);
        out["projections"] = to_array(latrep::pca_project(model, u.rows));
        return out;
    }, py::arg("dirs"), py::arg("n_components") = 2);

    // steering
    m.def("extract_pattern", [](const Array& dirs, std::size_t k, std::optional<std::size_t> d_target, double alpha,
                                int layer_source, int layer_target, bool bypass_filter, const std::string& filter_mode) {
        const auto u = to_dirs(dirs, layer_source);
        const auto cfg = config_from_kwargs(k, u.d(), d_target.value_or(u.d()), alpha, layer_source, layer_target,
                                            bypass_filter, filter_mode);
        const auto sv = steering::extract_pattern(u, cfg);
        return py::make_tuple(to_array(sv.values), sv.original_norm);
    }, py::arg("dirs"), py::arg("k"), py::arg("d_target") = py::none(), py::arg("alpha") = 0.0,
       py::arg("layer_source") = 0, py::arg("layer_target") = 0, py::arg("bypass_filter") = false,
       py::arg("filter_mode") = "aggregate",
       "Mean of the direction rows, low-passed at k, resampled to d_target and rescaled to the mean's norm. "
       "Returns (vector, original_norm).");
    m.def("inject", [](const Array& h, const Array& v, double alpha) {
        return to_array(steering::inject(to_vector(h), to_vector(v), alpha));
    }, py::arg("h"), py::arg("v"), py::arg("alpha"));

    // tensor store
    m.def("read_tensor", [](const std::string& path) {
        const auto f = store::read_file(path);
        Array values(std::vector<py::ssize_t>(f.dims.begin(), f.dims.end()));
        std::copy(f.values.begin(), f.values.end(), values.mutable_data());
        return py::make_tuple(values, to_py(f.meta));
    }, py::arg("path"), "Returns (array, metadata dict).");
    m.def("write_tensor", [](const std::string& path, const Array& values, const py::object& meta, const std::string& dtype) {
        store::TensorFile f;
        for (py::ssize_t i = 0; i < values.ndim(); ++i) f.dims.push_back(static_cast<std::uint64_t>(values.shape(i)));
        f.values.assign(values.data(), values.data() + values.size());
        if (dtype == "f64") f.dtype = store::DType::f64;
        else if (dtype == "f32") f.dtype = store::DType::f32;
        else fail(ErrorKind::usage, "dtype must be 'f64' or 'f32'");
        f.meta = meta.is_none() ? nlohmann::json::object() : from_py(meta);
        if (f.dims.size() == 2) store::require_finite(Matrix(f.dims[0], f.dims[1], f.values), "write_tensor");
        else store::require_finite(Matrix(1, f.values.size(), f.values), "write_tensor");
        store::write_file(path, f);
    }, py::arg("path"), py::arg("values"), py::arg("meta") = py::none(), py::arg("dtype") = "f64");

    // toy networks
    py::class_<toy::ToyNetParams>(m, "ToyNet")
        .def(py::init([](std::size_t n_layers, std::size_t d_hidden, std::size_t vocab, std::uint64_t seed) {
                 toy::ToyConfig cfg{n_layers, d_hidden, vocab, seed};
                 return toy::ToyNetParams::generate(cfg);
             }),
             py::arg("n_layers"), py::arg("d_hidden"), py::arg("vocab"), py::arg("seed"))
        .def_static("source", [] { return toy::ToyNetParams::generate(toy::source_config()); })
        .def_static("target", [] { return toy::ToyNetParams::generate(toy::target_config()); })
        .def_property_readonly("d_hidden", [](const toy::ToyNetParams& p) { return p.config.d_hidden; })
        .def_property_readonly("n_layers", [](const toy::ToyNetParams& p) { return p.config.n_layers; })
        .def("forward", [](const toy::ToyNetParams& p, const std::vector<int>& tokens, std::optional<Array> vector,
                           double alpha, int layer, const std::string& positions) {
            steering::Positions pos = positions == "all" ? steering::Positions::all : steering::Positions::last;
            if (positions != "all" && positions != "last") fail(ErrorKind::usage, "positions must be 'last' or 'all'");
            toy::ForwardResult r;
            if (vector) {
                steering::SteeringVector sv;
                sv.values = to_vector(*vector);
                steering::SteeringConfig cfg;
                cfg.d_target = sv.values.size();
                cfg.layer_target = layer;
                cfg.alpha = alpha;
                const auto hook = steering::make_hook(sv, cfg);
                r = toy::toy_forward(p, tokens, &hook, pos);
            } else {
                r = toy::toy_forward(p, tokens);
            }
            return py::make_tuple(to_array(r.logits), to_array(r.final_hidden));
        }, py::arg("tokens"), py::arg("vector") = py::none(), py::arg("alpha") = 0.0, py::arg("layer") = 0,
           py::arg("positions") = "last",
           "Returns (logits, final-position hidden state per layer). With a vector, injects it at `layer`.");

    m.def("synth_directions", [](const py::dict& spec) {
        return to_array(toy::synth_directions(toy::SynthSpec::from_json(from_py(spec))).rows);
    }, py::arg("spec"));
    m.def("drift_experiment", [](const py::dict& clean, const py::dict& noisy, std::size_t k) {
        return to_py(toy::drift_experiment(toy::SynthSpec::from_json(from_py(clean)),
                                           toy::SynthSpec::from_json(from_py(noisy)), k).to_json());
    }, py::arg("clean"), py::arg("noisy"), py::arg("k"));
}
