#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "segloss/geometry.hpp"
#include "segloss/io.hpp"
#include "segloss/losses.hpp"
#include "segloss/metrics.hpp"

namespace py = pybind11;
using namespace segloss;

namespace {

Shape shape_of(std::size_t h, std::size_t w, std::size_t n, const char* what)
{
    const Shape s{h, w};
    validate_shape(s);
    if (n != s.size()) {
        throw ShapeError(std::string(what) + " has " + std::to_string(n) + " values, expected " +
                         std::to_string(s.size()) + " for " + to_string(s));
    }
    return s;
}

Mask to_mask(const std::vector<double>& v, Shape s)
{
    std::vector<std::uint8_t> bits(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0 && v[i] != 1.0) {
            throw DomainError("mask value at index " + std::to_string(i) + " is not 0 or 1");
        }
        bits[i] = v[i] == 1.0 ? 1 : 0;
    }
    return Mask(s, std::move(bits));
}

LossConfig to_config(const std::optional<py::dict>& config)
{
    LossConfig cfg;
    if (config) {
        for (const auto& [key, value] : *config) {
            std::string text;
            if (py::isinstance<py::bool_>(value)) {
                text = value.cast<bool>() ? "true" : "false";
            } else {
                text = format_shortest(value.cast<double>());
            }
            apply_config_override(cfg, key.cast<std::string>() + "=" + text);
        }
    }
    cfg.validate();
    return cfg;
}

struct Inputs {
    Mask truth;
    ProbabilityMap pred;
    std::optional<DistanceMap> phi;
    LossConfig cfg;
    LossId id;
};

Inputs gather(const std::string& name, const std::vector<double>& truth, const std::vector<double>& pred,
              std::size_t h, std::size_t w, const std::optional<py::dict>& config,
              const std::optional<std::vector<double>>& phi)
{
    const auto id = parse_loss_id(name);
    if (!id) {
        throw ConfigError("unknown loss '" + name + "'; valid names: " + valid_loss_names());
    }
    Inputs in;
    in.id = *id;
    in.truth = to_mask(truth, shape_of(h, w, truth.size(), "truth"));
    in.pred = ProbabilityMap(shape_of(h, w, pred.size(), "pred"), pred);
    if (phi) {
        in.phi = DistanceMap(shape_of(h, w, phi->size(), "phi"), *phi);
    }
    in.cfg = to_config(config);
    return in;
}

}  // namespace

PYBIND11_MODULE(_segloss, m)
{
    m.doc() = "Segmentation losses, gradients and metrics over flat row-major buffers";

    static py::exception<Error> error(m, "Error", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error.ptr(), e.what());
        }
    });

    m.def(
        "loss",
        [](const std::string& name, const std::vector<double>& truth, const std::vector<double>& pred,
           std::size_t h, std::size_t w, const std::optional<py::dict>& config,
           const std::optional<std::vector<double>>& phi) {
            const Inputs in = gather(name, truth, pred, h, w, config, phi);
            return loss_value(in.id, in.truth, in.pred, in.cfg, in.phi ? &*in.phi : nullptr);
        },
        py::arg("name"), py::arg("truth"), py::arg("pred"), py::arg("h"), py::arg("w"),
        py::arg("config") = py::none(), py::arg("phi") = py::none());

    m.def(
        "gradient",
        [](const std::string& name, const std::vector<double>& truth, const std::vector<double>& pred,
           std::size_t h, std::size_t w, const std::optional<py::dict>& config,
           const std::optional<std::vector<double>>& phi) {
            const Inputs in = gather(name, truth, pred, h, w, config, phi);
            return analytic_gradient(in.id, in.truth, in.pred, in.cfg, in.phi ? &*in.phi : nullptr).vector();
        },
        py::arg("name"), py::arg("truth"), py::arg("pred"), py::arg("h"), py::arg("w"),
        py::arg("config") = py::none(), py::arg("phi") = py::none());

    m.def(
        "boundary_distance",
        [](const std::vector<double>& truth, std::size_t h, std::size_t w, bool normalize) {
            return boundary_distance_map(to_mask(truth, shape_of(h, w, truth.size(), "truth")), normalize).vector();
        },
        py::arg("truth"), py::arg("h"), py::arg("w"), py::arg("normalize") = true);

    m.def(
        "metrics",
        [](const std::vector<double>& truth, const std::vector<double>& pred, std::size_t h, std::size_t w,
           double threshold) {
            const Mask y = to_mask(truth, shape_of(h, w, truth.size(), "truth"));
            const Mask p = binarize(ProbabilityMap(shape_of(h, w, pred.size(), "pred"), pred), threshold);
            const HardConfusion c = hard_confusion(p, y);
            py::dict out;
            out["dice_coefficient"] = dice_coefficient(c);
            out["sensitivity"] = sensitivity(c);
            out["specificity"] = specificity(c);
            const auto hd = boundary_hausdorff(p, y);
            out["hausdorff_distance"] = hd ? py::object(py::float_(*hd)) : py::object(py::none());
            return out;
        },
        py::arg("truth"), py::arg("pred"), py::arg("h"), py::arg("w"), py::arg("threshold") = 0.5);

    m.def("loss_names", [] {
        std::vector<std::string> names;
        for (LossId id : kAllLosses) {
            names.emplace_back(loss_name(id));
        }
        return names;
    });

    m.def("version", [] { return std::string(SEGLOSS_VERSION); });
}
